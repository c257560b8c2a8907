#include "cradar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "cradar/detection.hpp"

namespace cradar {

namespace {

struct Measurement {
  Observation obs;
  double lambda_stat = 0.0;
  double sigma = 0.0;  // estimator sigma_hat of this dwell
};

// Measurement machinery for one dwell's waveform.
class DwellContext {
 public:
  DwellContext(const ScenarioConfig& cfg, const WaveformSpec& wf, double lambda)
      : cfg_(cfg), wf_(wf), grid_{cfg.l_theta}, lambda_(lambda) {
    cov_.spec = cfg.disturbance;
    cov_.sigma_c = cfg.sigma_c;
  }

  double sigma_for_bin(int bin) const {
    const double theta = grid_.center_deg(bin);
    if (cfg_.disturbance.model == DisturbanceSpec::Model::kWhite)
      return sigma_hat_white(tx_gain(wf_.w, theta), cfg_.n_rx, cfg_.sigma_c);
    return sigma_hat(virtual_vector(wf_.w, theta, cfg_.n_rx), cov_);
  }

  Measurement measure_target(const TargetState& truth, const RadarEquationMap& rcs,
                             int chosen_bin, RandomStream& rng) const {
    const int true_bin = grid_.bin_of(truth.angle_deg());
    const bool on_target = chosen_bin == true_bin;
    const std::complex<double> alpha =
        on_target ? rcs.amplitude(truth, rng) : std::complex<double>(0.0, 0.0);

    Measurement m;
    m.sigma = sigma_for_bin(chosen_bin);
    std::complex<double> alpha_hat;
    if (cfg_.mode == EnvMode::kAnalytic) {
      alpha_hat = alpha + rng.complex_normal(m.sigma);
    } else {
      const Eigen::VectorXcd v =
          virtual_vector(wf_.w, grid_.center_deg(chosen_bin), cfg_.n_rx);
      Eigen::VectorXcd y(v.size());
      if (cfg_.disturbance.model == DisturbanceSpec::Model::kWhite) {
        for (Eigen::Index i = 0; i < y.size(); ++i)
          y(i) = rng.complex_normal(cfg_.sigma_c);
      } else {
        const double rho = cfg_.disturbance.rho;
        const double inno = cfg_.sigma_c * std::sqrt(1.0 - rho * rho);
        y(0) = rng.complex_normal(cfg_.sigma_c);
        for (Eigen::Index i = 1; i < y.size(); ++i)
          y(i) = rho * y(i - 1) + rng.complex_normal(inno);
      }
      y += alpha * v;
      alpha_hat = (v.adjoint() * y)(0) / v.squaredNorm();
    }

    m.lambda_stat = wald_statistic(alpha_hat, m.sigma);
    if (m.lambda_stat >= lambda_) {
      m.obs.detected = true;
      m.obs.raw_mag = std::abs(alpha_hat);
      m.obs.sigma_at_detection = m.sigma;
    }
    return m;
  }

  const AngleGrid& grid() const { return grid_; }

 private:
  const ScenarioConfig& cfg_;
  const WaveformSpec& wf_;
  DisturbanceCov cov_;
  AngleGrid grid_;
  double lambda_;
};

TargetState belief_mean(const BeliefSet& belief) {
  TargetState m;
  for (const auto& p : belief.particles) {
    m.x += p.x;
    m.vx += p.vx;
    m.y += p.y;
    m.vy += p.vy;
  }
  const double inv = 1.0 / belief.size();
  m.x *= inv;
  m.vx *= inv;
  m.y *= inv;
  m.vy *= inv;
  return m;
}

// Initial belief from a scan detection: uniform over the detected bin's
// angular sector and the range interval obtained by inverting the radar
// equation over |alpha_hat| +- 3 sigma (magnitude floored at |alpha_hat|/20
// so the far endpoint stays finite at low threshold margins); velocities
// uniform in [-v_max, v_max] per axis.
BeliefSet init_belief(const AngleGrid& grid, int bin, double raw_mag, double sigma,
                      double kappa, const ScenarioConfig& cfg, RandomStream& rng) {
  const double mag_lo = std::max(raw_mag - 3.0 * sigma, raw_mag / 20.0);
  const double mag_hi = raw_mag + 3.0 * sigma;
  const double r_lo = std::sqrt(kappa / mag_hi);
  const double r_hi = std::sqrt(kappa / mag_lo);
  const double th_lo = grid.lower_deg(bin);
  const double th_hi = grid.upper_deg(bin);

  BeliefSet belief;
  belief.particles.reserve(cfg.n_particles);
  for (int i = 0; i < cfg.n_particles; ++i) {
    const double theta = rng.uniform(th_lo, th_hi) * M_PI / 180.0;
    const double r = rng.uniform(r_lo, r_hi);
    TargetState p;
    p.x = r * std::cos(theta);
    p.y = r * std::sin(theta);
    p.vx = rng.uniform(-cfg.v_max, cfg.v_max);
    p.vy = rng.uniform(-cfg.v_max, cfg.v_max);
    belief.particles.push_back(p);
  }
  return belief;
}

// Advance all truth states one step and enforce the scenario assumptions.
void advance_truth(std::vector<TargetState>& truth, const MotionModel& motion,
                   const AngleGrid& grid, RandomStream& env_rng) {
  std::set<int> bins;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    truth[m] = motion.step(truth[m], env_rng);
    if (!(truth[m].x > 0.0) || !(truth[m].range() > 0.0))
      throw SimulationError("target " + std::to_string(m) + " left the field of view");
    const int bin = grid.bin_of(truth[m].angle_deg());
    if (!bins.insert(bin).second)
      throw SimulationError("two targets occupy angle bin " + std::to_string(bin));
  }
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t run_seed,
                          const EngineOptions& opt) {
  const int m_targets = cfg.num_targets();
  const MotionModel motion{cfg.dt, cfg.sigma_s};
  const AngleGrid grid{cfg.l_theta};
  const double lambda = threshold_for(cfg.pfa);
  const PlannerParams params = PlannerParams::from(cfg);
  const WaveformSpec w_ort = orthogonal_waveform(cfg.n_tx, cfg.total_power);

  RandomStream env_rng = RandomStream::derived(run_seed, 0x454e56);
  std::vector<RandomStream> tgt_rng;
  for (int m = 0; m < m_targets; ++m)
    tgt_rng.push_back(RandomStream::derived(run_seed, 0x544754 + m));

  struct TargetRuntime {
    GeneratorState gen;
    BeliefSet belief;
    SearchTree tree;
    History history;
    bool acquired = false;
  };
  std::vector<TargetRuntime> rt(m_targets);
  std::vector<TargetState> truth;
  for (int m = 0; m < m_targets; ++m) {
    truth.push_back(cfg.targets[m].state);
    rt[m].gen.motion = motion;
    rt[m].gen.rcs = RadarEquationMap{cfg.targets[m].kappa};
    rt[m].gen.grid = grid;
    rt[m].gen.lambda = lambda;
    rt[m].gen.sigma_hat = 1.0;  // placeholder until the first detection
  }

  EpisodeResult res;

  // Acquisition: isotropic dwells interrogating each missing target's true
  // bin until everything has been detected once.
  const DwellContext scan_ctx(cfg, w_ort, lambda);
  int acquired_count = 0;
  try {
    while (acquired_count < m_targets) {
      if (res.scan_dwells >= cfg.dwell_cap) {
        res.truncation_reason = "acquisition exceeded the dwell cap";
        res.truncated = true;
        return res;
      }
      ++res.scan_dwells;
      advance_truth(truth, motion, grid, env_rng);
      for (int m = 0; m < m_targets; ++m) {
        if (rt[m].acquired) {
          // Keep acquired beliefs time-aligned while the scan continues.
          BeliefSet moved;
          moved.particles.reserve(rt[m].belief.size());
          for (const auto& p : rt[m].belief.particles) {
            TargetState q = p;
            bool ok = false;
            for (int tries = 0; tries < 16 && !ok; ++tries) {
              q = motion.step(p, tgt_rng[m]);
              ok = q.x > 0.0 && q.range() > 0.0;
            }
            moved.particles.push_back(ok ? q : p);
          }
          rt[m].belief = std::move(moved);
          continue;
        }
        const int true_bin = grid.bin_of(truth[m].angle_deg());
        const Measurement meas =
            scan_ctx.measure_target(truth[m], rt[m].gen.rcs, true_bin, env_rng);
        if (meas.obs.detected) {
          rt[m].acquired = true;
          ++acquired_count;
          rt[m].gen.sigma_hat = meas.obs.sigma_at_detection;
          rt[m].belief = init_belief(grid, true_bin, meas.obs.raw_mag, meas.sigma,
                                     cfg.targets[m].kappa, cfg, env_rng);
        }
      }
    }
  } catch (const SimulationError& e) {
    res.truncation_reason = e.what();
    res.truncated = true;
    return res;
  }
  res.acquired = true;
  for (int m = 0; m < m_targets; ++m) {
    TargetState mean{};
    for (const auto& p : rt[m].belief.particles) {
      mean.x += p.x;
      mean.vx += p.vx;
      mean.y += p.y;
      mean.vy += p.vy;
    }
    const double inv = 1.0 / static_cast<double>(rt[m].belief.size());
    mean.x *= inv;
    mean.vx *= inv;
    mean.y *= inv;
    mean.vy *= inv;
    res.acquisition_estimates.push_back(mean);
    res.acquisition_truth.push_back(truth[m]);
  }

  // Tracking loop.
  std::vector<int> chosen(m_targets, 0);
  std::vector<TargetWeight> weights(m_targets);
  std::vector<Measurement> meas(m_targets);
  res.steps.reserve(static_cast<std::size_t>(cfg.t_max) * m_targets);
  for (int t = 0; t < cfg.t_max; ++t) {
    if (opt.parallel_planners) {
#pragma omp parallel for schedule(static)
      for (int m = 0; m < m_targets; ++m) {
        if (!params.tree_reuse) rt[m].tree.reset();
        chosen[m] = rt[m].tree.plan(rt[m].belief, rt[m].gen, params, tgt_rng[m]);
      }
    } else {
      for (int m = 0; m < m_targets; ++m) {
        if (!params.tree_reuse) rt[m].tree.reset();
        chosen[m] = rt[m].tree.plan(rt[m].belief, rt[m].gen, params, tgt_rng[m]);
      }
    }

    try {
      std::set<int> chosen_set(chosen.begin(), chosen.end());
      if (static_cast<int>(chosen_set.size()) != m_targets)
        throw SimulationError("planners steered two beams into one angle bin");

      for (int m = 0; m < m_targets; ++m) {
        const TargetState pred = predict_mean(rt[m].belief, motion);
        weights[m].theta_deg = grid.center_deg(chosen[m]);
        weights[m].delta = predict_delta(pred);
      }

      WaveformSpec wf;
      switch (cfg.strategy) {
        case Strategy::kOrthogonal:
          wf = w_ort;
          break;
        case Strategy::kUniform:
          wf = uniform_waveform(grid, chosen, cfg.n_tx, cfg.total_power);
          break;
        case Strategy::kPowerAware:
          wf = power_aware_waveform(weights, cfg.n_tx, cfg.total_power);
          break;
      }
      const DwellContext ctx(cfg, wf, lambda);

      advance_truth(truth, motion, grid, env_rng);
      for (int m = 0; m < m_targets; ++m)
        meas[m] = ctx.measure_target(truth[m], rt[m].gen.rcs, chosen[m], env_rng);

      for (int m = 0; m < m_targets; ++m) {
        // Branch keys were laid down with the plan-time sigma, so the root is
        // advanced before the refresh; the belief update then runs with the
        // refreshed noise level as the real loop does.
        const ObsKey plan_key =
            meas[m].obs.detected
                ? static_cast<ObsKey>(
                      discretize(meas[m].obs.raw_mag, rt[m].gen.sigma_hat))
                : kEmptyObs;
        if (params.tree_reuse)
          rt[m].tree.advance_root(chosen[m], plan_key);
        else
          rt[m].tree.reset();
        if (meas[m].obs.detected)
          rt[m].gen.sigma_hat = meas[m].obs.sigma_at_detection;
        rt[m].belief = update_belief(rt[m].belief, chosen[m], meas[m].obs, rt[m].gen,
                                     params, tgt_rng[m]);
        rt[m].history.steps.emplace_back(chosen[m], plan_key);
      }

      for (int m = 0; m < m_targets; ++m) {
        const TargetState est = belief_mean(rt[m].belief);
        StepRecord row;
        row.t = t;
        row.target = m;
        row.true_x = truth[m].x;
        row.true_y = truth[m].y;
        row.true_vx = truth[m].vx;
        row.true_vy = truth[m].vy;
        row.est_x = est.x;
        row.est_y = est.y;
        row.est_vx = est.vx;
        row.est_vy = est.vy;
        row.true_bin = grid.bin_of(truth[m].angle_deg());
        row.chosen_bin = chosen[m];
        row.detected = meas[m].obs.detected;
        row.lambda_stat = meas[m].lambda_stat;
        row.allocated_power =
            wf.powers.size() > 0 ? wf.powers(m) : 0.0;
        row.snr_db = snr_db_at(rt[m].gen.rcs, truth[m].range(), cfg.sigma_c);
        res.steps.push_back(row);
      }
    } catch (const SimulationError& e) {
      res.truncation_reason = e.what();
      res.truncated = true;
      return res;
    }
  }
  return res;
}

BatchResult run_monte_carlo(const ScenarioConfig& cfg, int n_runs,
                            std::uint64_t master_seed, const EngineOptions& opt) {
  if (n_runs < 1) throw ConfigError("n_runs must be positive");
  cfg.validate();
  BatchResult batch;
  batch.runs.resize(n_runs);
  if (opt.parallel_runs) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_runs; ++i)
      batch.runs[i] = run_episode(cfg, derive_seed(master_seed, i), opt);
  } else {
    for (int i = 0; i < n_runs; ++i)
      batch.runs[i] = run_episode(cfg, derive_seed(master_seed, i), opt);
  }
  return batch;
}

std::vector<SummaryRow> aggregate(const BatchResult& batch) {
  struct Acc {
    double det = 0.0, pos_sq = 0.0, vel_sq = 0.0;
    int n = 0;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (const auto& run : batch.runs) {
    for (const auto& row : run.steps) {
      Acc& a = acc[{row.t, row.target}];
      a.det += row.detected ? 1.0 : 0.0;
      const double dx = row.est_x - row.true_x;
      const double dy = row.est_y - row.true_y;
      const double dvx = row.est_vx - row.true_vx;
      const double dvy = row.est_vy - row.true_vy;
      a.pos_sq += dx * dx + dy * dy;
      a.vel_sq += dvx * dvx + dvy * dvy;
      a.n += 1;
    }
  }
  std::vector<SummaryRow> rows;
  rows.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    SummaryRow r;
    r.t = key.first;
    r.target = key.second;
    r.n_runs = a.n;
    r.pd_mean = a.det / a.n;
    r.pos_rmse = std::sqrt(a.pos_sq / a.n);
    r.vel_rmse = std::sqrt(a.vel_sq / a.n);
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_steps_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const BatchResult*>>& batches) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "run_id,t,target_id,true_x,true_y,true_vx,true_vy,"
         "est_x,est_y,est_vx,est_vy,true_bin,chosen_bin,detected,"
         "lambda_stat,allocated_power,snr_db\n";
  for (const auto& [label, batch] : batches) {
    for (std::size_t i = 0; i < batch->runs.size(); ++i) {
      const std::string run_id = label + "-" + std::to_string(i);
      for (const auto& r : batch->runs[i].steps) {
        out << run_id << ',' << r.t << ',' << r.target << ',' << fmt9(r.true_x)
            << ',' << fmt9(r.true_y) << ',' << fmt9(r.true_vx) << ','
            << fmt9(r.true_vy) << ',' << fmt9(r.est_x) << ',' << fmt9(r.est_y)
            << ',' << fmt9(r.est_vx) << ',' << fmt9(r.est_vy) << ',' << r.true_bin
            << ',' << r.chosen_bin << ',' << (r.detected ? 1 : 0) << ','
            << fmt9(r.lambda_stat) << ',' << fmt9(r.allocated_power) << ','
            << fmt9(r.snr_db) << '\n';
      }
    }
  }
}

void write_summary_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<SummaryRow>>>& summaries) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "t,target_id,pd_mean,pos_rmse,vel_rmse,strategy\n";
  for (const auto& [label, rows] : summaries) {
    for (const auto& r : rows) {
      out << r.t << ',' << r.target << ',' << fmt9(r.pd_mean) << ','
          << fmt9(r.pos_rmse) << ',' << fmt9(r.vel_rmse) << ',' << label << '\n';
    }
  }
}

}  // namespace cradar
