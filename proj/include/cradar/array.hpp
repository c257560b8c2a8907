#pragma once

#include <Eigen/Dense>
#include <complex>

#include "cradar/errors.hpp"

namespace cradar {

// Uniform partition of the half-plane field of view [-90, +90) degrees into
// l_theta left-closed bins.
struct AngleGrid {
  int l_theta = 1;

  double width_deg() const { return 180.0 / l_theta; }

  int bin_of(double angle_deg) const {
    if (!(angle_deg >= -90.0) || angle_deg >= 90.0)
      throw SimulationError("angle outside field of view");
    const int bin = static_cast<int>(std::floor((angle_deg + 90.0) / width_deg()));
    return std::min(std::max(bin, 0), l_theta - 1);
  }

  double center_deg(int bin) const { return -90.0 + (bin + 0.5) * width_deg(); }
  double lower_deg(int bin) const { return -90.0 + bin * width_deg(); }
  double upper_deg(int bin) const { return -90.0 + (bin + 1) * width_deg(); }
};

// Half-wavelength ULA steering vector, entries exp(j pi k sin(theta)).
Eigen::VectorXcd steering_vector(double theta_deg, int n);

// Unit-norm transmit beam pointed at theta for the transposed beampattern
// convention a_T^T(theta) R a_T^*(theta): the conjugate steering direction.
Eigen::VectorXcd tx_beam(double theta_deg, int n);

// Transmit gain ||W^T a_T(theta)||^2; equals the beampattern value for R = WW^H.
double tx_gain(const Eigen::MatrixXcd& w, double theta_deg);

// Virtual array response v = (W^T a_T(theta)) kron a_R(theta), length
// n_tx * n_rx for an n_tx-column waveform matrix.
Eigen::VectorXcd virtual_vector(const Eigen::MatrixXcd& w, double theta_deg, int n_rx);

// ||v||^2 without forming v: ||W^T a_T||^2 * n_rx, since receive steering
// entries have unit modulus.
double virtual_norm_sq(const Eigen::MatrixXcd& w, double theta_deg, int n_rx);

}  // namespace cradar
