#include "cradar/waveform.hpp"

#include <cmath>
#include <set>

namespace cradar {

WaveformSpec orthogonal_waveform(int n_tx, double p_t) {
  if (n_tx < 1) throw ConfigError("n_tx must be positive");
  if (!(p_t > 0.0)) throw ConfigError("total power must be positive");
  WaveformSpec spec;
  spec.strategy = Strategy::kOrthogonal;
  spec.w = std::sqrt(p_t / n_tx) *
           Eigen::MatrixXcd::Identity(n_tx, n_tx);
  spec.r = (p_t / n_tx) * Eigen::MatrixXcd::Identity(n_tx, n_tx);
  return spec;
}

namespace {

// Shared assembly: beams with powers -> R and a zero-padded rank-M factor W.
WaveformSpec beams_to_spec(const std::vector<Eigen::VectorXcd>& beams,
                           const Eigen::VectorXd& powers, int n_tx,
                           Strategy strategy) {
  const int m = static_cast<int>(beams.size());
  WaveformSpec spec;
  spec.strategy = strategy;
  spec.powers = powers;
  spec.w = Eigen::MatrixXcd::Zero(n_tx, n_tx);
  spec.r = Eigen::MatrixXcd::Zero(n_tx, n_tx);
  for (int i = 0; i < m; ++i) {
    spec.w.col(i) = std::sqrt(powers(i)) * beams[i];
    spec.r += powers(i) * (beams[i] * beams[i].adjoint());
  }
  return spec;
}

}  // namespace

WaveformSpec uniform_waveform(const AngleGrid& grid, const std::vector<int>& bins,
                              int n_tx, double p_t) {
  if (bins.empty()) throw ConfigError("uniform waveform needs at least one bin");
  if (static_cast<int>(bins.size()) > n_tx)
    throw ConfigError("more beams than transmit elements");
  if (!(p_t > 0.0)) throw ConfigError("total power must be positive");
  std::set<int> seen;
  for (int b : bins) {
    if (b < 0 || b >= grid.l_theta) throw ConfigError("bin index out of range");
    if (!seen.insert(b).second)
      throw SimulationError("duplicate beam bin " + std::to_string(b));
  }
  const int m = static_cast<int>(bins.size());
  std::vector<Eigen::VectorXcd> beams;
  beams.reserve(m);
  for (int b : bins) beams.push_back(tx_beam(grid.center_deg(b), n_tx));
  const Eigen::VectorXd powers = Eigen::VectorXd::Constant(m, p_t / m);
  return beams_to_spec(beams, powers, n_tx, Strategy::kUniform);
}

double predict_delta(const TargetState& predicted) {
  const double r = predicted.range();
  if (!(r > 0.0)) throw SimulationError("nonpositive predicted range");
  return 1.0 / (r * r * r * r);
}

MaxMinSolution maxmin_power_allocation(const Eigen::MatrixXd& gain,
                                       const Eigen::VectorXd& delta, double p_t) {
  const int m = static_cast<int>(delta.size());
  if (gain.rows() != m || gain.cols() != m)
    throw ConfigError("gain matrix must be square with one row per target");
  if (!(p_t > 0.0)) throw ConfigError("total power must be positive");
  if (m > 12) throw ConfigError("max-min allocation limited to 12 beams");
  for (int k = 0; k < m; ++k)
    if (!(delta(k) > 0.0)) throw ConfigError("priority weights must be positive");

  if (m == 1) {
    MaxMinSolution sol;
    sol.p = Eigen::VectorXd::Constant(1, p_t);
    sol.value = delta(0) * gain(0, 0) * p_t;
    return sol;
  }

  // Linear program in (p, t): maximize t subject to
  //   delta_k (G p)_k - t >= 0,  sum p = p_t,  p >= 0.
  // A basic point fixes the power-sum equality plus m of the 2m inequalities
  // to equality; the optimum is attained at one of them. Constraint index
  // c < m means beam constraint c holds with equality, c >= m means
  // p_{c-m} = 0. Combinations are visited in lexicographic order, so the
  // all-beams-tight (fully equalized) point wins ties deterministically.
  MaxMinSolution best;
  best.value = -1.0;
  std::vector<int> combo(m);
  for (int i = 0; i < m; ++i) combo[i] = i;

  Eigen::MatrixXd sys(m + 1, m + 1);
  Eigen::VectorXd rhs(m + 1);
  const double slack_tol = 1e-9 * std::max(1.0, p_t);

  auto evaluate = [&]() {
    sys.setZero();
    rhs.setZero();
    sys.row(0).head(m).setOnes();
    rhs(0) = p_t;
    for (int i = 0; i < m; ++i) {
      const int c = combo[i];
      if (c < m) {
        sys.row(i + 1).head(m) = delta(c) * gain.row(c);
        sys(i + 1, m) = -1.0;
      } else {
        sys(i + 1, c - m) = 1.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    const Eigen::VectorXd p = x.head(m);
    const double t = x(m);
    if ((p.array() < -slack_tol).any()) return;
    const Eigen::VectorXd attained = delta.asDiagonal() * (gain * p);
    if ((attained.array() < t - slack_tol * std::max(1.0, std::abs(t))).any()) return;
    if (t > best.value) {
      best.value = t;
      best.p = p.cwiseMax(0.0);
    }
  };

  // Lexicographic enumeration of all m-subsets of the 2m inequality set.
  while (true) {
    evaluate();
    int i = m - 1;
    while (i >= 0 && combo[i] == 2 * m - (m - i)) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < m; ++j) combo[j] = combo[j - 1] + 1;
  }

  if (best.value < 0.0)
    throw SimulationError("max-min allocation found no feasible point");
  // Restore the exact power budget after the nonnegativity clamp.
  best.p *= p_t / best.p.sum();
  best.value = (delta.asDiagonal() * (gain * best.p)).minCoeff();
  return best;
}

WaveformSpec power_aware_waveform(const std::vector<TargetWeight>& weights, int n_tx,
                                  double p_t) {
  if (weights.empty()) throw ConfigError("power-aware waveform needs targets");
  if (static_cast<int>(weights.size()) > n_tx)
    throw ConfigError("more beams than transmit elements");
  const int m = static_cast<int>(weights.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(weights[i].theta_deg - weights[j].theta_deg) < 1e-12)
        throw SimulationError("coincident beam directions");

  std::vector<Eigen::VectorXcd> beams;
  beams.reserve(m);
  for (const auto& wgt : weights) beams.push_back(tx_beam(wgt.theta_deg, n_tx));

  // gain(k, j): beampattern contribution of beam j at target direction k.
  Eigen::MatrixXd gain(m, m);
  Eigen::VectorXd delta(m);
  for (int k = 0; k < m; ++k) {
    delta(k) = weights[k].delta;
    const Eigen::VectorXcd a = steering_vector(weights[k].theta_deg, n_tx);
    for (int j = 0; j < m; ++j) {
      const std::complex<double> c = a.transpose() * beams[j];
      gain(k, j) = std::norm(c);
    }
  }

  const MaxMinSolution sol = maxmin_power_allocation(gain, delta, p_t);
  return beams_to_spec(beams, sol.p, n_tx, Strategy::kPowerAware);
}

}  // namespace cradar
