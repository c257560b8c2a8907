#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "cradar/array.hpp"
#include "cradar/detection.hpp"
#include "cradar/rng.hpp"

using namespace cradar;

TEST_CASE("detection threshold inverts the false-alarm probability") {
  CHECK(threshold_for(std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(threshold_for(1e-4) == doctest::Approx(18.420680743952364).epsilon(1e-12));
  CHECK(threshold_for(1e-2) == doctest::Approx(9.210340371976182).epsilon(1e-12));
  CHECK(threshold_for(1e-3) == doctest::Approx(13.815510557964274).epsilon(1e-12));
}

TEST_CASE("statistic doubles the squared magnitude in noise units") {
  CHECK(wald_statistic(std::complex<double>(3.0, 4.0), 5.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(wald_statistic(std::complex<double>(0.0, 0.0), 1.0) == 0.0);
}

TEST_CASE("observation discretization floors magnitude in beta units") {
  const double sigma = 0.25;
  const double beta = std::sqrt(3.0) * sigma;
  CHECK(discretize(0.0, sigma) == 0);
  CHECK(discretize(0.999 * beta, sigma) == 0);
  CHECK(discretize(1.001 * beta, sigma) == 1);
  CHECK(discretize(7.5 * beta, sigma) == 7);
}

TEST_CASE("white-noise sigma-hat shortcut matches the general form") {
  RandomStream rng(41);
  const DisturbanceCov cov{{DisturbanceSpec::Model::kWhite, 0.0}, 0.8};
  for (int trial = 0; trial < 50; ++trial) {
    const int n_tx = 8, n_rx = 6, m = 3;
    Eigen::MatrixXcd w(n_tx, m);
    for (int i = 0; i < n_tx; ++i)
      for (int j = 0; j < m; ++j)
        w(i, j) = std::complex<double>(rng.normal(), rng.normal());
    const double theta = rng.uniform(-80.0, 80.0);
    const Eigen::VectorXcd v = virtual_vector(w, theta, n_rx);
    const double general = sigma_hat(v, cov);
    const double gain = tx_gain(w, theta);
    CHECK(general == doctest::Approx(sigma_hat_white(gain, n_rx, 0.8)).epsilon(1e-10));
  }
}

TEST_CASE("correlated-noise quadratic form matches a dense covariance solve") {
  // Oracle: build the full Toeplitz AR(1) covariance and evaluate
  // v^H Sigma v with dense linear algebra, then compare the O(N) path.
  RandomStream rng(43);
  for (const double rho : {0.1, 0.5, 0.9, 0.99}) {
    const DisturbanceCov cov{{DisturbanceSpec::Model::kAr1, rho}, 1.3};
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 40;
      Eigen::VectorXcd v(n);
      for (int i = 0; i < n; ++i)
        v(i) = std::complex<double>(rng.normal(), rng.normal());
      Eigen::MatrixXcd sigma(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          sigma(i, j) = 1.3 * 1.3 * std::pow(rho, std::abs(i - j));
      const double dense = (v.adjoint() * sigma * v)(0).real();
      const double fast = cov.quad_form(v);
      CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
      CHECK(sigma_hat(v, cov) ==
            doctest::Approx(std::sqrt(dense) / v.squaredNorm()).epsilon(1e-10));
    }
  }
}

TEST_CASE("ar1 quadratic form reduces to white when rho is zero") {
  RandomStream rng(47);
  const DisturbanceCov white{{DisturbanceSpec::Model::kWhite, 0.0}, 2.0};
  const DisturbanceCov ar0{{DisturbanceSpec::Model::kAr1, 0.0}, 2.0};
  Eigen::VectorXcd v(25);
  for (int i = 0; i < 25; ++i)
    v(i) = std::complex<double>(rng.normal(), rng.normal());
  CHECK(ar0.quad_form(v) == doctest::Approx(white.quad_form(v)).epsilon(1e-12));
}

TEST_CASE("Marcum Q1 reproduces frozen reference values") {
  // References computed independently (scipy.stats.ncx2.sf cross-checked
  // against a 40-digit mpmath series; 2 |a_hat|^2 / sigma^2 is noncentral
  // chi-square with 2 dof).
  const double lam = 18.420680743952364;
  auto pd = [&](double snr) { return pd_oracle(snr, lam); };
  CHECK(pd(0.0) == doctest::Approx(1.0000000000000009e-4).epsilon(1e-9));
  CHECK(pd(1.0) == doctest::Approx(0.0036812986513641713).epsilon(1e-9));
  CHECK(pd(5.0) == doctest::Approx(0.16040333037144706).epsilon(1e-9));
  CHECK(pd(10.0) == doctest::Approx(0.61613584850756469).epsilon(1e-9));
  CHECK(pd(20.0) == doctest::Approx(0.98335701442467503).epsilon(1e-9));
  CHECK(pd(50.0) == doctest::Approx(0.99999999631951926).epsilon(1e-9));
}

TEST_CASE("Marcum Q1 handles boundary and extreme arguments") {
  CHECK(marcum_q1(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(marcum_q1(5.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(marcum_q1(0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  // Very strong signal: detection is essentially certain even though the
  // naive series representation would underflow.
  CHECK(marcum_q1(60.0, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marcum_q1(1e-3, 40.0) < 1e-100);  // hopeless threshold, tiny tail
  // Monotone in both arguments.
  CHECK(marcum_q1(3.0, 4.0) > marcum_q1(2.0, 4.0));
  CHECK(marcum_q1(3.0, 4.0) > marcum_q1(3.0, 5.0));
}

TEST_CASE("Monte Carlo false alarms track the analytic threshold") {
  // Under noise only, a_hat ~ CN(0, sigma^2) so the statistic is chi-square
  // with 2 dof and P(stat > lambda) = pfa by construction.
  RandomStream rng(53);
  const double pfa = 1e-2;
  const double lam = threshold_for(pfa);
  const double sigma = 0.37;
  int hits = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> a = rng.complex_normal(sigma);
    if (wald_statistic(a, sigma) >= lam) ++hits;
  }
  const double rate = double(hits) / n;
  CHECK(rate == doctest::Approx(pfa).epsilon(0.08));
}
