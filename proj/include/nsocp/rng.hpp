#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "nsocp/cone.hpp"

namespace nsocp {

// mt19937_64 with hand-rolled real mappings so streams do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    if (spare_) {
      const double s = *spare_;
      spare_.reset();
      return s;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }
  Vec normal_vec(int k) {
    Vec v(k);
    for (int i = 0; i < k; ++i) v[i] = normal();
    return v;
  }
  Vec unit_vec(int k) {
    Vec v = normal_vec(k);
    double nv = v.norm();
    while (nv < 1e-12) {
      v = normal_vec(k);
      nv = v.norm();
    }
    return v / nv;
  }

 private:
  std::mt19937_64 eng_;
  std::optional<double> spare_;
};

// NSOCP_SEED, when set, overrides the given seed.
std::uint64_t resolve_seed(std::uint64_t fallback);

}  // namespace nsocp
