#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "rankagg/errors.hpp"

namespace rankagg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable mapping from (root seed, stream index) to a per-stream seed, so
// parallel work can draw from independent generators deterministically.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

// Seeded generator with the noise distributions used across the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream derived from this generator's seed (not its
  // current state), so child streams are stable regardless of draw order.
  Rng child(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  // Fresh stream keyed to this generator's current position, so repeated
  // forks from the same generator are mutually independent.
  Rng fork() { return Rng(derive_seed(seed_, gen_())); }

  // uniform on [0,1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform on the open interval (0,1)
  double uniform_open01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // inclusive bounds
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw invalid_parameter_error("uniform_int needs lo <= hi");
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // mean 0, scale b, via inverse CDF
  double laplace(double scale) {
    if (scale < 0) throw invalid_parameter_error("laplace scale must be >= 0");
    if (scale == 0) return 0.0;
    const double u = uniform_open01() - 0.5;
    const double sign = u < 0 ? -1.0 : 1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
  }

  // mean 0, standard deviation sigma, via Box-Muller
  double gaussian(double sigma) {
    if (sigma < 0) throw invalid_parameter_error("gaussian sigma must be >= 0");
    if (sigma == 0) return 0.0;
    if (have_spare_) {
      have_spare_ = false;
      return sigma * spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return sigma * r * std::cos(theta);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rankagg
