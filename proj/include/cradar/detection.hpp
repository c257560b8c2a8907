#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "cradar/errors.hpp"
#include "cradar/scenario.hpp"

namespace cradar {

// Detection threshold with the prescribed false-alarm rate: under noise only
// the statistic is chi-square with 2 degrees of freedom, so
// P(Lambda >= lambda) = exp(-lambda/2).
inline double threshold_for(double pfa) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("pfa must lie in (0, 1)");
  return -2.0 * std::log(pfa);
}

// Normalized Wald statistic 2 |alpha_hat|^2 / sigma_hat^2.
inline double wald_statistic(std::complex<double> alpha_hat, double sigma_hat) {
  if (!(sigma_hat > 0.0)) throw SimulationError("sigma_hat must be positive");
  return 2.0 * std::norm(alpha_hat) / (sigma_hat * sigma_hat);
}

// Quantization of a detected magnitude into cells of width sqrt(3) sigma_hat.
inline int discretize(double raw_mag, double sigma_hat) {
  if (!(sigma_hat > 0.0)) throw SimulationError("sigma_hat must be positive");
  if (raw_mag < 0.0) throw SimulationError("magnitude must be nonnegative");
  return static_cast<int>(std::floor(raw_mag / (std::sqrt(3.0) * sigma_hat)));
}

// Disturbance covariance model used by the estimator: white or stationary
// AR(1) with lag-one correlation rho, both scaled by sigma_c^2.
struct DisturbanceCov {
  DisturbanceSpec spec;
  double sigma_c = 1.0;

  // v^H Sigma v, using the Toeplitz structure for AR(1) in O(N).
  double quad_form(const Eigen::VectorXcd& v) const {
    const double s2 = sigma_c * sigma_c;
    if (spec.model == DisturbanceSpec::Model::kWhite) return s2 * v.squaredNorm();
    const double rho = spec.rho;
    double diag = 0.0, cross = 0.0;
    std::complex<double> tail(0.0, 0.0);  // sum_{i<j} rho^(j-i) conj(v_i), running in j
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (j > 0) tail = rho * (tail + std::conj(v(j - 1)));
      diag += std::norm(v(j));
      cross += (tail * v(j)).real();
    }
    return s2 * (diag + 2.0 * cross);
  }
};

// Amplitude-estimate standard deviation sqrt(v^H Sigma v) / ||v||^2.
inline double sigma_hat(const Eigen::VectorXcd& v, const DisturbanceCov& cov) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw SimulationError("virtual array vector must be nonzero");
  return std::sqrt(cov.quad_form(v)) / n2;
}

// White-noise closed form sigma_c / ||v||, from the transmit gain and receive
// aperture without materializing v.
inline double sigma_hat_white(double tx_gain, int n_rx, double sigma_c) {
  const double n2 = tx_gain * n_rx;
  if (!(n2 > 0.0)) throw SimulationError("virtual array vector must be nonzero");
  return sigma_c / std::sqrt(n2);
}

// Marcum Q_1(a, b) via the Poisson mixture of chi-square tails; absolute
// truncation error below 1e-12.
double marcum_q1(double a, double b);

// Detection probability of the threshold test at output SNR
// |alpha|^2 / sigma_hat^2: the statistic is noncentral chi-square with 2
// degrees of freedom and noncentrality 2 snr_out.
inline double pd_oracle(double snr_out, double lambda) {
  if (snr_out < 0.0) throw ConfigError("snr_out must be nonnegative");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  return marcum_q1(std::sqrt(2.0 * snr_out), std::sqrt(lambda));
}

// One dwell's measurement outcome for a single target.
struct Observation {
  bool detected = false;
  double raw_mag = 0.0;             // |alpha_hat| when detected
  double sigma_at_detection = 0.0;  // estimator sigma_hat of the detecting dwell
};

}  // namespace cradar
