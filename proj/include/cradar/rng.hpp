#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace cradar {

// Counter-style seed derivation so independent streams (runs, targets) can be
// spawned from one master seed without overlap.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
  return splitmix64(master ^ splitmix64(salt ^ 0xa076bc9f8ed61d1bULL));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  static RandomStream derived(std::uint64_t master, std::uint64_t salt) {
    return RandomStream(derive_seed(master, salt));
  }

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; stateless so draw order is reproducible across platforms.
  std::pair<double, double> normal_pair() {
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  double normal() { return normal_pair().first; }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Circularly symmetric complex Gaussian with E|z|^2 = sigma^2.
  std::complex<double> complex_normal(double sigma) {
    auto [a, b] = normal_pair();
    const double s = sigma * M_SQRT1_2;
    return {s * a, s * b};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cradar
