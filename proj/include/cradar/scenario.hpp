#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cradar/errors.hpp"
#include "cradar/rng.hpp"

namespace cradar {

// Planar target state [x, vx, y, vy] in km and km/s. The radar sits at the
// origin; targets must keep x > 0 so the direction angle stays inside the
// half-plane field of view.
struct TargetState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;

  double range() const { return std::hypot(x, y); }
  double angle_deg() const { return std::atan2(y, x) * 180.0 / M_PI; }
  double speed() const { return std::hypot(vx, vy); }
};

// Discrete white-noise-acceleration motion: block-diagonal constant-velocity
// transition per axis, with acceleration noise sigma_s entering through
// [dt^2/2, dt].
struct MotionModel {
  double dt = 1.0;
  double sigma_s = 0.0;

  TargetState drift(const TargetState& s) const {
    return {s.x + dt * s.vx, s.vx, s.y + dt * s.vy, s.vy};
  }

  TargetState step(const TargetState& s, RandomStream& rng) const {
    TargetState n = drift(s);
    if (sigma_s > 0.0) {
      auto [wx, wy] = rng.normal_pair();
      const double gp = 0.5 * dt * dt * sigma_s;
      const double gv = dt * sigma_s;
      n.x += gp * wx;
      n.vx += gv * wx;
      n.y += gp * wy;
      n.vy += gv * wy;
    }
    return n;
  }
};

// Deterministic range-to-magnitude map |alpha| = kappa / R^2 with uniformly
// random phase per look.
struct RadarEquationMap {
  double kappa = 1.0;

  double magnitude(double range) const {
    if (!(range > 0.0)) throw SimulationError("nonpositive range in radar equation");
    return kappa / (range * range);
  }

  std::complex<double> amplitude(const TargetState& s, RandomStream& rng) const {
    const double mag = magnitude(s.range());
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    return std::polar(mag, phase);
  }
};

// Reflectivity constant giving the requested per-channel SNR at range r0:
// |alpha|^2 / sigma_c^2 = 10^(snr_db/10) when R = r0.
double calibrate_kappa(double snr_db, double r0, double sigma_c);

// Per-channel SNR in dB at the given range for a calibrated map.
double snr_db_at(const RadarEquationMap& map, double range, double sigma_c);

enum class Strategy { kOrthogonal, kUniform, kPowerAware };
enum class EnvMode { kAnalytic, kSignal };

std::string to_string(Strategy s);
std::string to_string(EnvMode m);
Strategy parse_strategy(const std::string& name);
EnvMode parse_env_mode(const std::string& name);

struct DisturbanceSpec {
  enum class Model { kWhite, kAr1 };
  Model model = Model::kWhite;
  double rho = 0.0;  // AR(1) lag-one correlation, |rho| < 1
};

struct PlannerOptions {
  int rollout_depth = 5;
  double discount = 0.95;
  bool tree_reuse = true;
  int refill_attempts_factor = 10;  // rejection budget = factor * particle count
};

struct TargetInit {
  TargetState state;
  double snr0_db = 0.0;  // per-channel SNR at the initial range
  double kappa = 0.0;    // resolved reflectivity constant
  bool kappa_given = false;
};

struct ScenarioConfig {
  std::string name;
  std::vector<TargetInit> targets;

  double dt = 1.0;
  int t_max = 350;
  double sigma_s = 0.0;
  double v_max = 0.3;

  int n_tx = 100;
  int n_rx = 100;
  int l_theta = 100;

  double total_power = 1.0;
  double pfa = 1e-4;
  double sigma_c = 1.0;
  DisturbanceSpec disturbance;

  int n_sim = 12000;
  int n_particles = 12000;
  double c_ucb = M_SQRT2;
  PlannerOptions planner;

  int dwell_cap = 50;
  std::uint64_t seed = 1;
  Strategy strategy = Strategy::kPowerAware;
  EnvMode mode = EnvMode::kAnalytic;

  int num_targets() const { return static_cast<int>(targets.size()); }

  // Full structural and semantic validation; throws ConfigError. Semantic
  // checks include pairwise-distinct initial angle bins and field-of-view
  // containment along the noise-free horizon rollout.
  void validate() const;
};

// JSON round trip. Unknown keys are rejected at every nesting level.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string write_scenario(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

// Shipped configurations: the full-scale three-target scenario and a reduced
// desk-scale variant that preserves its SNR decay spans.
ScenarioConfig paper_config();
ScenarioConfig desk_config();

}  // namespace cradar
