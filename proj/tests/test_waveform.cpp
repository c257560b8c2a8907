#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "cradar/array.hpp"
#include "cradar/errors.hpp"
#include "cradar/rng.hpp"
#include "cradar/waveform.hpp"

using namespace cradar;

namespace {

double weighted_min(const Eigen::MatrixXd& gain, const Eigen::VectorXd& delta,
                    const Eigen::VectorXd& p) {
  double worst = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd gp = gain * p;
  for (int k = 0; k < delta.size(); ++k) worst = std::min(worst, delta(k) * gp(k));
  return worst;
}

// Brute-force oracle: scan the simplex sum(p) = p_t on a uniform grid and
// return the best min_k delta_k (G p)_k seen. Independent of the solver.
double grid_maxmin(const Eigen::MatrixXd& gain, const Eigen::VectorXd& delta,
                   double p_t, int steps) {
  const int m = static_cast<int>(gain.cols());
  REQUIRE(m >= 2);
  REQUIRE(m <= 3);
  double best = -1.0;
  if (m == 2) {
    for (int i = 0; i <= steps; ++i) {
      Eigen::VectorXd p(2);
      p << p_t * i / steps, p_t * (steps - i) / steps;
      best = std::max(best, weighted_min(gain, delta, p));
    }
    return best;
  }
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j + i <= steps; ++j) {
      Eigen::VectorXd p(3);
      p << p_t * i / steps, p_t * j / steps, p_t * (steps - i - j) / steps;
      best = std::max(best, weighted_min(gain, delta, p));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("orthogonal waveform spreads power evenly with identity covariance") {
  const WaveformSpec spec = orthogonal_waveform(10, 1.0);
  REQUIRE(spec.w.rows() == 10);
  REQUIRE(spec.w.cols() == 10);
  CHECK((spec.w * spec.w.adjoint() - spec.r).norm() < 1e-12);
  CHECK(std::abs(spec.r.trace().real() - 1.0) < 1e-12);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(10, 10) * 0.1;
  CHECK((spec.r - eye).norm() < 1e-12);
  // Every direction sees the same transmit gain p_t.
  for (const double theta : {-80.0, -30.0, 10.0, 65.0}) {
    CHECK(tx_gain(spec.w, theta) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("uniform waveform splits power across the tracked directions") {
  const AngleGrid grid{20};
  const std::vector<int> bins{2, 10, 18};
  const WaveformSpec spec = uniform_waveform(grid, bins, 20, 2.0);
  REQUIRE(spec.w.rows() == 20);
  CHECK((spec.w * spec.w.adjoint() - spec.r).norm() < 1e-10);
  CHECK(std::abs(spec.r.trace().real() - 2.0) < 1e-10);
  REQUIRE(spec.powers.size() == 3);
  for (int j = 0; j < 3; ++j)
    CHECK(spec.powers(j) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // Each tracked direction receives (close to) the focused share of gain;
  // cross terms between well-separated beams are small but not zero.
  for (int b : bins) {
    const double g = tx_gain(spec.w, grid.center_deg(b));
    CHECK(g > 0.9 * (2.0 / 3.0) * 20.0);
    CHECK(g < 1.1 * (2.0 / 3.0) * 20.0);
  }
  CHECK_THROWS_AS(uniform_waveform(grid, {4, 4}, 20, 1.0), SimulationError);
  CHECK_THROWS_AS(uniform_waveform(grid, {25}, 20, 1.0), ConfigError);
}

TEST_CASE("range-derived weights fall off as the fourth power") {
  CHECK(predict_delta({1.0, 0, 0.0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(predict_delta({2.0, 0, 0.0, 0}) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  // Range 60.5 via a 3-4-5 triangle: (36.3, 48.4).
  CHECK(predict_delta({36.3, 0, 48.4, 0}) ==
        doctest::Approx(7.464118083355735e-8).epsilon(1e-12));
  CHECK_THROWS_AS(predict_delta({0.0, 0, 0.0, 0}), SimulationError);
}

TEST_CASE("max-min allocation equalizes a two-beam toy exactly") {
  // With unit self-gain, no cross-gain, and weights (1, 1/16), the optimum
  // equalizes delta_k p_k: p = (1/17, 16/17) of the budget.
  const Eigen::MatrixXd gain = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd delta(2);
  delta << 1.0, 1.0 / 16.0;
  const MaxMinSolution sol = maxmin_power_allocation(gain, delta, 1.0);
  REQUIRE(sol.p.size() == 2);
  CHECK(sol.p(0) == doctest::Approx(1.0 / 17.0).epsilon(1e-9));
  CHECK(sol.p(1) == doctest::Approx(16.0 / 17.0).epsilon(1e-9));
  CHECK(delta(0) * sol.p(0) == doctest::Approx(delta(1) * sol.p(1)).epsilon(1e-9));
  CHECK(sol.value == doctest::Approx(1.0 / 17.0).epsilon(1e-9));
}

TEST_CASE("single-beam allocation gets the whole budget") {
  Eigen::MatrixXd gain(1, 1);
  gain << 7.0;
  Eigen::VectorXd delta(1);
  delta << 0.25;
  const MaxMinSolution sol = maxmin_power_allocation(gain, delta, 2.0);
  CHECK(sol.p(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.value == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("max-min allocation beats or matches a fine simplex scan") {
  RandomStream rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + (trial % 2);
    Eigen::MatrixXd gain(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        gain(i, j) = (i == j) ? rng.uniform(5.0, 20.0) : rng.uniform(0.0, 0.5);
    Eigen::VectorXd delta(m);
    for (int i = 0; i < m; ++i)
      delta(i) = std::pow(10.0, rng.uniform(-4.0, 0.0));
    const double p_t = rng.uniform(0.5, 3.0);
    const MaxMinSolution sol = maxmin_power_allocation(gain, delta, p_t);
    CHECK(sol.p.minCoeff() >= -1e-12);
    CHECK(sol.p.sum() == doctest::Approx(p_t).epsilon(1e-9));
    const double got = weighted_min(gain, delta, sol.p);
    CHECK(sol.value == doctest::Approx(got).epsilon(1e-9));
    const double ref = grid_maxmin(gain, delta, p_t, 400);
    // The exact solution may only exceed a grid scan, up to grid resolution.
    CHECK(got >= ref * (1.0 - 5e-3));
  }
}

TEST_CASE("max-min allocation starves a beam nobody benefits from") {
  // Beam 1 helps both targets strictly less than beam 0 does; every unit of
  // power moved to beam 0 raises both weighted gains, so p = (p_t, 0).
  Eigen::MatrixXd gain(2, 2);
  gain << 10.0, 1.0, 10.0, 1.0;
  Eigen::VectorXd delta(2);
  delta << 1.0, 1.0;
  const MaxMinSolution sol = maxmin_power_allocation(gain, delta, 1.0);
  CHECK(sol.p(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.p(1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.value == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("power-aware waveform equalizes weighted beampattern across targets") {
  const int n_tx = 20;
  std::vector<TargetWeight> weights;
  weights.push_back({-67.5, 1.0});
  weights.push_back({4.5, 1.0 / 16.0});
  weights.push_back({58.5, 1.0 / 81.0});
  const WaveformSpec spec = power_aware_waveform(weights, n_tx, 1.0);
  CHECK(std::abs(spec.r.trace().real() - 1.0) < 1e-9);
  CHECK((spec.w * spec.w.adjoint() - spec.r).norm() < 1e-9);
  CHECK(spec.powers.sum() == doctest::Approx(1.0).epsilon(1e-9));
  // Weighted transmit gains equalize at the optimum for well-separated beams.
  std::vector<double> weighted;
  for (const auto& wgt : weights)
    weighted.push_back(wgt.delta * tx_gain(spec.w, wgt.theta_deg));
  CHECK(weighted[0] == doctest::Approx(weighted[1]).epsilon(1e-6));
  CHECK(weighted[1] == doctest::Approx(weighted[2]).epsilon(1e-6));
  // The low-priority (far) target soaks up the most transmit power.
  CHECK(spec.powers(2) > spec.powers(1));
  CHECK(spec.powers(1) > spec.powers(0));
}

TEST_CASE("coincident beam directions are rejected") {
  std::vector<TargetWeight> weights;
  weights.push_back({10.0, 1.0});
  weights.push_back({10.0, 0.5});
  CHECK_THROWS_AS(power_aware_waveform(weights, 16, 1.0), SimulationError);
}
