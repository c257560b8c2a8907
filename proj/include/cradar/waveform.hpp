#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cradar/array.hpp"
#include "cradar/scenario.hpp"

namespace cradar {

// Transmit design for one dwell: waveform factor W (n_tx x n_tx), its
// covariance R = WW^H, and the per-target power split where the strategy
// defines one (empty for the isotropic baseline).
struct WaveformSpec {
  Eigen::MatrixXcd w;
  Eigen::MatrixXcd r;
  Eigen::VectorXd powers;
  Strategy strategy = Strategy::kOrthogonal;
};

// Isotropic baseline W = sqrt(p_t / n_tx) * I.
WaveformSpec orthogonal_waveform(int n_tx, double p_t);

// Equal-power beams at the given angle bins: R = sum_m (p_t / M) b_m b_m^H
// with unit-norm beams b_m, factored as a zero-padded rank-M W.
WaveformSpec uniform_waveform(const AngleGrid& grid, const std::vector<int>& bins,
                              int n_tx, double p_t);

struct TargetWeight {
  double theta_deg = 0.0;  // beam direction (chosen bin center)
  double delta = 1.0;      // priority weight, 1 / predicted_range^4
};

// Max-min fair split: maximize min_k delta_k * B(theta_k) over per-beam powers
// summing to p_t, with R restricted to the span of the target beams. B is the
// transmit beampattern of the resulting R.
WaveformSpec power_aware_waveform(const std::vector<TargetWeight>& weights, int n_tx,
                                  double p_t);

// Priority weight from a predicted target state: inverse fourth power of range.
double predict_delta(const TargetState& predicted);

struct MaxMinSolution {
  Eigen::VectorXd p;
  double value = 0.0;
};

// Exact solution of  max_p min_k delta_k (G p)_k  s.t. sum p = p_t, p >= 0,
// by enumerating basic feasible points of the equivalent linear program.
// gain(k, m) is the beampattern contribution of beam m at target k.
MaxMinSolution maxmin_power_allocation(const Eigen::MatrixXd& gain,
                                       const Eigen::VectorXd& delta, double p_t);

}  // namespace cradar
