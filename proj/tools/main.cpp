#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cradar/engine.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// Matplotlib companion script dropped next to the CSV outputs.
void write_plot_script(const std::filesystem::path& path) {
  std::ofstream out(path);
  out << R"PY(#!/usr/bin/env python3
"""Plot per-target detection rate and tracking RMSE curves from summary.csv."""
import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
SUMMARY = os.path.join(HERE, "summary.csv")

series = defaultdict(lambda: defaultdict(list))  # (strategy, target) -> column -> values
with open(SUMMARY, newline="") as fh:
    for row in csv.DictReader(fh):
        key = (row["strategy"], int(row["target_id"]))
        series[key]["t"].append(int(row["t"]))
        series[key]["pd"].append(float(row["pd_mean"]))
        series[key]["pos"].append(float(row["pos_rmse"]))
        series[key]["vel"].append(float(row["vel_rmse"]))

targets = sorted({k[1] for k in series})
strategies = sorted({k[0] for k in series})
fig, axes = plt.subplots(3, len(targets), figsize=(5 * len(targets), 10),
                         sharex=True, squeeze=False)
rows = [("pd", "detection rate"), ("pos", "position RMSE [km]"),
        ("vel", "velocity RMSE [km/s]")]
for col, tgt in enumerate(targets):
    for rix, (field, label) in enumerate(rows):
        ax = axes[rix][col]
        for strat in strategies:
            data = series.get((strat, tgt))
            if data:
                ax.plot(data["t"], data[field], label=strat)
        if rix == 0:
            ax.set_title(f"target {tgt}")
        if col == 0:
            ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
axes[0][0].legend()
for ax in axes[-1]:
    ax.set_xlabel("step")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "metrics.png"), dpi=150)
print("wrote", os.path.join(HERE, "metrics.png"))
)PY";
}

void print_batch_digest(const std::string& label, const cradar::BatchResult& batch,
                        const std::vector<cradar::SummaryRow>& summary) {
  int truncated = 0;
  int unacquired = 0;
  for (const auto& run : batch.runs) {
    if (run.truncated) ++truncated;
    if (!run.acquired) ++unacquired;
  }
  int t_max = 0;
  int n_targets = 0;
  for (const auto& row : summary) {
    t_max = std::max(t_max, row.t + 1);
    n_targets = std::max(n_targets, row.target + 1);
  }
  std::printf("%s: %zu runs (%d truncated, %d unacquired)\n", label.c_str(),
              batch.runs.size(), truncated, unacquired);
  for (int m = 0; m < n_targets; ++m) {
    double pd = 0.0, pos = 0.0;
    int n = 0;
    for (const auto& row : summary) {
      if (row.target != m || row.t < (3 * t_max) / 4) continue;
      pd += row.pd_mean;
      pos += row.pos_rmse;
      ++n;
    }
    if (n > 0)
      std::printf("  target %d, final quarter: detection rate %.3f, position RMSE %.3f km\n",
                  m, pd / n, pos / n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive MIMO radar detection and tracking simulator"};
  app.get_formatter()->column_width(32);

  std::string scenario_path;
  std::string preset;
  std::string strategies_arg;
  std::string out_dir = "out";
  std::string mode_arg;
  int runs = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool validate_only = false;
  bool serial = false;

  app.add_option("--scenario", scenario_path, "Scenario JSON file");
  app.add_option("--preset", preset, "Built-in scenario: paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--strategies", strategies_arg,
                 "Comma-separated strategies: orthogonal, uniform, power-aware");
  app.add_option("--runs", runs, "Independent Monte Carlo runs per strategy")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--mode", mode_arg, "Environment mode: analytic or signal")
      ->check(CLI::IsMember({"analytic", "signal"}));
  app.add_flag("--validate", validate_only, "Validate the scenario and exit");
  app.add_flag("--serial", serial, "Disable parallel run dispatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }
  seed_given = seed_opt->count() > 0;

  try {
    if (scenario_path.empty() == preset.empty()) {
      std::cerr << "error: exactly one of --scenario or --preset is required\n";
      return 2;
    }
    cradar::ScenarioConfig cfg;
    if (!preset.empty())
      cfg = preset == "paper" ? cradar::paper_config() : cradar::desk_config();
    else
      cfg = cradar::load_scenario(scenario_path);

    if (seed_given) cfg.seed = seed;
    if (!mode_arg.empty()) cfg.mode = cradar::parse_env_mode(mode_arg);

    std::vector<cradar::Strategy> strategies;
    if (strategies_arg.empty()) {
      strategies.push_back(cfg.strategy);
    } else {
      for (const auto& name : split_csv_list(strategies_arg))
        strategies.push_back(cradar::parse_strategy(name));
    }
    if (strategies.empty()) {
      std::cerr << "error: empty strategy list\n";
      return 2;
    }

    cfg.validate();
    if (validate_only) {
      const cradar::AngleGrid grid{cfg.l_theta};
      std::printf("scenario ok: %d targets, horizon %d, grid %d bins\n",
                  cfg.num_targets(), cfg.t_max, cfg.l_theta);
      for (int m = 0; m < cfg.num_targets(); ++m) {
        const auto& t = cfg.targets[m];
        std::printf(
            "  target %d: bin %d, range %.3f km, initial per-channel SNR %.2f dB\n", m,
            grid.bin_of(t.state.angle_deg()), t.state.range(), t.snr0_db);
      }
      return 0;
    }

    std::filesystem::create_directories(out_dir);
    cradar::EngineOptions opt;
    opt.parallel_runs = !serial;

    std::vector<std::pair<std::string, cradar::BatchResult>> batches;
    for (const auto strat : strategies) {
      cradar::ScenarioConfig run_cfg = cfg;
      run_cfg.strategy = strat;
      batches.emplace_back(cradar::to_string(strat),
                           cradar::run_monte_carlo(run_cfg, runs, cfg.seed, opt));
    }

    std::vector<std::pair<std::string, const cradar::BatchResult*>> steps_view;
    std::vector<std::pair<std::string, std::vector<cradar::SummaryRow>>> summaries;
    for (const auto& [label, batch] : batches) {
      steps_view.emplace_back(label, &batch);
      summaries.emplace_back(label, cradar::aggregate(batch));
    }

    const std::filesystem::path out(out_dir);
    cradar::write_steps_csv((out / "steps.csv").string(), steps_view);
    cradar::write_summary_csv((out / "summary.csv").string(), summaries);
    write_plot_script(out / "plot_metrics.py");

    for (std::size_t i = 0; i < batches.size(); ++i)
      print_batch_digest(batches[i].first, batches[i].second, summaries[i].second);
    std::printf("wrote %s, %s, %s\n", (out / "steps.csv").c_str(),
                (out / "summary.csv").c_str(), (out / "plot_metrics.py").c_str());
    return 0;
  } catch (const cradar::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
