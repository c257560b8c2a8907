#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "cradar/array.hpp"
#include "cradar/errors.hpp"
#include "cradar/rng.hpp"

using namespace cradar;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("angle grid bins cover the forward half plane") {
  const AngleGrid g100{100};
  CHECK(g100.width_deg() == doctest::Approx(1.8).epsilon(1e-15));
  // (x, y) = (20, -60) sits at atan2(-60, 20).
  CHECK(g100.bin_of(-71.56505117707799) == 10);
  CHECK(g100.bin_of(7.125016348901798) == 53);
  CHECK(g100.bin_of(85.23635830927383) == 97);
  CHECK(g100.bin_of(-90.0) == 0);
  CHECK(g100.bin_of(0.0) == 50);
  CHECK(g100.bin_of(89.999999) == 99);
  CHECK_THROWS_AS(g100.bin_of(90.0), SimulationError);
  CHECK_THROWS_AS(g100.bin_of(-90.0000001), SimulationError);
  CHECK_THROWS_AS(g100.bin_of(135.0), SimulationError);

  const AngleGrid g20{20};
  CHECK(g20.bin_of(-71.56505117707799) == 2);
  CHECK(g20.width_deg() == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("bin centers land back in their own bin") {
  const AngleGrid g{37};
  for (int k = 0; k < 37; ++k) {
    CHECK(g.bin_of(g.center_deg(k)) == k);
    CHECK(g.lower_deg(k) < g.center_deg(k));
    CHECK(g.center_deg(k) < g.upper_deg(k));
    // The computed lower edge may round a hair below the exact bin boundary,
    // so only points strictly inside the bin are required to map back.
    const int at_edge = g.bin_of(g.lower_deg(k));
    CHECK(at_edge >= k - 1);
    CHECK(at_edge <= k);
    CHECK(g.bin_of(g.lower_deg(k) + 1e-6 * g.width_deg()) == k);
  }
  CHECK(g.lower_deg(0) == doctest::Approx(-90.0).epsilon(1e-15));
  CHECK(g.upper_deg(36) == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("steering vector is unit modulus and all ones at broadside") {
  const Eigen::VectorXcd a = steering_vector(0.0, 16);
  REQUIRE(a.size() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(a(i).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a(i).imag() == doctest::Approx(0.0).epsilon(1e-15));
  }
  const Eigen::VectorXcd b = steering_vector(37.5, 16);
  for (int i = 0; i < 16; ++i) CHECK(std::abs(b(i)) == doctest::Approx(1.0).epsilon(1e-12));
  // Half-wavelength phase progression: element k advances by pi*k*sin(theta).
  const double psi = kPi * std::sin(37.5 * kPi / 180.0);
  for (int i = 0; i < 16; ++i) {
    CHECK(std::arg(b(i) * std::exp(std::complex<double>(0, -psi * i))) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("array correlation matches the Dirichlet kernel") {
  // Oracle: for half-wavelength spacing,
  //   |a(u)^H a(v)| / N = |sin(N x / 2) / (N sin(x / 2))|,  x = pi (sin v - sin u).
  const int n = 24;
  RandomStream rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const double u = rng.uniform(-89.0, 89.0);
    const double v = rng.uniform(-89.0, 89.0);
    const Eigen::VectorXcd au = steering_vector(u, n);
    const Eigen::VectorXcd av = steering_vector(v, n);
    const double x =
        kPi * (std::sin(v * kPi / 180.0) - std::sin(u * kPi / 180.0));
    double expect;
    if (std::abs(std::sin(x / 2.0)) < 1e-12) {
      expect = 1.0;
    } else {
      expect = std::abs(std::sin(n * x / 2.0) / (n * std::sin(x / 2.0)));
    }
    CHECK(std::abs(au.dot(av)) / n == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("conjugate transmit beam focuses the full array gain") {
  const int n = 20;
  for (const double theta : {-71.0, -13.5, 0.0, 42.0, 88.0}) {
    const Eigen::VectorXcd a = steering_vector(theta, n);
    const Eigen::VectorXcd b = tx_beam(theta, n);
    CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // a^T b = sqrt(N) when the beam points exactly at theta.
    CHECK(std::abs((a.transpose() * b)(0)) ==
          doctest::Approx(std::sqrt(double(n))).epsilon(1e-12));
  }
}

TEST_CASE("transmit gain peaks at the pointing direction") {
  const int n = 32;
  Eigen::MatrixXcd w(n, 1);
  w.col(0) = tx_beam(-20.0, n);
  const double peak = tx_gain(w, -20.0);
  CHECK(peak == doctest::Approx(double(n)).epsilon(1e-12));
  for (const double off : {-60.0, -35.0, 5.0, 40.0}) {
    CHECK(tx_gain(w, off) < peak);
  }
}

TEST_CASE("virtual array vector obeys the Kronecker norm identity") {
  RandomStream rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_tx = 3 + int(rng.uniform01() * 10);
    const int n_rx = 3 + int(rng.uniform01() * 10);
    const int m = 1 + int(rng.uniform01() * double(n_tx));
    Eigen::MatrixXcd w(n_tx, m);
    for (int i = 0; i < n_tx; ++i)
      for (int j = 0; j < m; ++j)
        w(i, j) = std::complex<double>(rng.normal(), rng.normal());
    const double theta = rng.uniform(-89.9, 89.9);
    const Eigen::VectorXcd v = virtual_vector(w, theta, n_rx);
    REQUIRE(v.size() == m * n_rx);
    CHECK(v.squaredNorm() == doctest::Approx(tx_gain(w, theta) * n_rx).epsilon(1e-10));
    CHECK(virtual_norm_sq(w, theta, n_rx) ==
          doctest::Approx(v.squaredNorm()).epsilon(1e-10));
    // Layout: v stacks the receive response scaled by each entry of W^T a_T.
    const Eigen::VectorXcd wa = w.transpose() * steering_vector(theta, n_tx);
    const Eigen::VectorXcd ar = steering_vector(theta, n_rx);
    for (int j = 0; j < m; ++j)
      for (int r = 0; r < n_rx; ++r)
        CHECK(std::abs(v(j * n_rx + r) - wa(j) * ar(r)) < 1e-12);
  }
}
