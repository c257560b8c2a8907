#include "cradar/detection.hpp"

namespace cradar {

namespace {

// Regularized upper incomplete gamma Q(s, x): series for the lower part when
// x < s + 1, modified Lentz continued fraction otherwise.
double gammq(double s, double x) {
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  const double fpmin = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double marcum_q1(double a, double b) {
  if (a < 0.0 || b < 0.0) throw ConfigError("marcum_q1 needs nonnegative arguments");
  if (b == 0.0) return 1.0;
  const double c = 0.5 * a * a;  // Poisson mixing rate
  const double h = 0.5 * b * b;
  if (c == 0.0) return std::exp(-h);

  // Q_1(a, b) = sum_k Pois(k; c) * P(chi2_{2k+2} >= 2h). The sum is expanded
  // outward from the Poisson mode in log space so large noncentralities do
  // not underflow; chi-square tails gain one Poisson(h) term per step.
  const long k0 = static_cast<long>(c);
  const double logc = std::log(c);
  const double logh = std::log(h);
  auto log_chi_term = [&](long k) {
    return -h + k * logh - std::lgamma(static_cast<double>(k) + 1.0);
  };

  const double pois0 =
      std::exp(-c + k0 * logc - std::lgamma(static_cast<double>(k0) + 1.0));
  const double tail0 = gammq(static_cast<double>(k0) + 1.0, h);

  double q = 0.0;
  double pois = pois0;
  double tail = tail0;
  for (long k = k0; k < k0 + 500000; ++k) {
    q += pois * tail;
    pois *= c / static_cast<double>(k + 1);
    if (pois < 1e-18) break;
    tail += std::exp(log_chi_term(k + 1));
    if (tail > 1.0) tail = 1.0;
  }
  pois = pois0;
  tail = tail0;
  for (long k = k0; k > 0; --k) {
    pois *= static_cast<double>(k) / c;
    if (pois < 1e-18) break;
    tail -= std::exp(log_chi_term(k));
    if (tail < 0.0) tail = 0.0;
    q += pois * tail;
  }
  return std::min(q, 1.0);
}

}  // namespace cradar
