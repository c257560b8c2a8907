#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cradar/planner.hpp"
#include "cradar/scenario.hpp"
#include "cradar/waveform.hpp"

namespace cradar {

// One target's row for one tracking step: ground truth, belief-mean estimate,
// interrogated and true bins, detection outcome, and the dwell's power share
// and per-channel SNR.
struct StepRecord {
  int t = 0;
  int target = 0;
  double true_x = 0.0, true_y = 0.0, true_vx = 0.0, true_vy = 0.0;
  double est_x = 0.0, est_y = 0.0, est_vx = 0.0, est_vy = 0.0;
  int true_bin = 0;
  int chosen_bin = 0;
  bool detected = false;
  double lambda_stat = 0.0;
  double allocated_power = 0.0;
  double snr_db = 0.0;
};

struct EpisodeResult {
  bool acquired = false;   // initial scan found every target within the dwell cap
  bool truncated = false;  // run ended early (field-of-view exit or beam collision)
  std::string truncation_reason;
  int scan_dwells = 0;
  std::vector<StepRecord> steps;  // one record per (step, target), step-major
  // Per-target belief means and true states at the moment acquisition
  // completed, before any tracking dwell refined them — the baseline the
  // tracking error should improve on.
  std::vector<TargetState> acquisition_estimates;
  std::vector<TargetState> acquisition_truth;
};

struct EngineOptions {
  bool parallel_runs = false;      // OpenMP dispatch of independent runs
  bool parallel_planners = false;  // OpenMP dispatch of per-target searches
};

// Full episode: orthogonal-scan acquisition followed by t_max planned dwells.
// Deterministic in (cfg, run_seed); planner scheduling does not change the
// result because every target owns its random stream.
EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t run_seed,
                          const EngineOptions& opt = {});

struct BatchResult {
  std::vector<EpisodeResult> runs;
};

// Independent runs with per-run seeds derived from the master seed by
// counter; results are identical for serial and parallel dispatch.
BatchResult run_monte_carlo(const ScenarioConfig& cfg, int n_runs,
                            std::uint64_t master_seed, const EngineOptions& opt = {});

struct SummaryRow {
  int t = 0;
  int target = 0;
  double pd_mean = 0.0;
  double pos_rmse = 0.0;
  double vel_rmse = 0.0;
  int n_runs = 0;  // runs contributing to this row
};

// Per-(step, target) detection rate and RMS errors across the batch.
std::vector<SummaryRow> aggregate(const BatchResult& batch);

// steps.csv: one row per (run, step, target) with run ids "<label>-<index>".
void write_steps_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BatchResult*>>& batches);

// summary.csv: aggregated rows with the strategy label as trailing column.
void write_summary_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<SummaryRow>>>& summaries);

}  // namespace cradar
