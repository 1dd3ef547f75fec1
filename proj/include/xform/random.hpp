#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "xform/types.hpp"

namespace xform {

// Deterministic generator used for every random quantity in the library.
// std::mt19937_64 is fully specified by the standard; the uniform and normal
// mappings below are fixed here because the standard distributions are
// implementation-defined. All randomness in a run flows from one 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  // Column-major fill order, entries i.i.d. N(0, stddev^2).
  Matrix gaussian_matrix(Index rows, Index cols, double stddev) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = stddev * normal();
    return m;
  }

  // Partial Fisher-Yates; result order is the sampling order.
  std::vector<Index> sample_without_replacement(Index population, Index count) {
    std::vector<Index> pool(static_cast<std::size_t>(population));
    for (Index i = 0; i < population; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<Index> picked;
    picked.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count && k < population; ++k) {
      const auto j = k + static_cast<Index>(below(static_cast<std::uint64_t>(population - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
      picked.push_back(pool[static_cast<std::size_t>(k)]);
    }
    return picked;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace xform
