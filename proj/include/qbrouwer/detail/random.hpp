#pragma once

#include <cmath>
#include <random>

#include "qbrouwer/geometry.hpp"

namespace qbrouwer::detail {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Uniform point of the closed unit ball of R^n.
inline Vector random_in_ball(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(n);
  double norm = 0.0;
  do {
    for (int d = 0; d < n; ++d) v(d) = gauss(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v * (std::pow(unit(rng), 1.0 / n) / norm);
}

}  // namespace qbrouwer::detail
