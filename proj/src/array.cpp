#include "cradar/array.hpp"

#include <cmath>

namespace cradar {

Eigen::VectorXcd steering_vector(double theta_deg, int n) {
  if (n < 1) throw ConfigError("steering vector needs at least one element");
  const double s = std::sin(theta_deg * M_PI / 180.0);
  Eigen::VectorXcd a(n);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, M_PI * k * s);
  return a;
}

Eigen::VectorXcd tx_beam(double theta_deg, int n) {
  return steering_vector(theta_deg, n).conjugate() / std::sqrt(static_cast<double>(n));
}

double tx_gain(const Eigen::MatrixXcd& w, double theta_deg) {
  const Eigen::VectorXcd a = steering_vector(theta_deg, static_cast<int>(w.rows()));
  return (w.transpose() * a).squaredNorm();
}

Eigen::VectorXcd virtual_vector(const Eigen::MatrixXcd& w, double theta_deg, int n_rx) {
  const Eigen::VectorXcd a_t = steering_vector(theta_deg, static_cast<int>(w.rows()));
  const Eigen::VectorXcd a_r = steering_vector(theta_deg, n_rx);
  const Eigen::VectorXcd x = w.transpose() * a_t;
  Eigen::VectorXcd v(x.size() * n_rx);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    v.segment(i * n_rx, n_rx) = x(i) * a_r;
  return v;
}

double virtual_norm_sq(const Eigen::MatrixXcd& w, double theta_deg, int n_rx) {
  return tx_gain(w, theta_deg) * n_rx;
}

}  // namespace cradar
