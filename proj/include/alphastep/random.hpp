#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "alphastep/numeric_core.hpp"

namespace alphastep {

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// d roots uniform in the open unit disk with pairwise separation >= min_sep.
inline std::vector<Complex> random_disk_roots(int d, double min_sep, std::mt19937_64& rng) {
  std::vector<Complex> roots;
  while (static_cast<int>(roots.size()) < d) {
    const double radius = std::sqrt(unit_uniform(rng));
    const double angle = 2.0 * std::numbers::pi * unit_uniform(rng);
    const Complex z = std::polar(radius, angle);
    bool ok = true;
    for (const auto& r : roots) ok = ok && std::abs(z - r) >= min_sep;
    if (ok) roots.push_back(z);
  }
  return roots;
}

}  // namespace alphastep
