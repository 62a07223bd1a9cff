#pragma once

// The built-in test polynomials: z^2 - 1/4, z^3 - 0.81z, eight roots on the
// circle of radius 0.9, and sixteen seeded random-root polynomials.

#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "alphastep/numeric_core.hpp"
#include "alphastep/random.hpp"

namespace alphastep {

struct SuiteEntry {
  std::string id;
  Polynomial polynomial;
};

inline constexpr std::uint64_t kDefaultSuiteSeed = 20240611;

inline std::vector<SuiteEntry> builtin_suite(std::uint64_t seed = kDefaultSuiteSeed) {
  std::vector<SuiteEntry> suite;
  suite.push_back({"z2-quarter", Polynomial::from_roots(std::vector<Complex>{0.5, -0.5})});
  suite.push_back({"z3-081z", Polynomial::from_roots(std::vector<Complex>{0.0, 0.9, -0.9})});
  std::vector<Complex> ring;
  for (int k = 0; k < 8; ++k) ring.push_back(std::polar(0.9, 2.0 * std::numbers::pi * k / 8));
  suite.push_back({"ring8", Polynomial::from_roots(ring)});

  std::mt19937_64 rng(seed);
  const int degrees[] = {4, 8, 16};
  for (int k = 0; k < 16; ++k) {
    const int d = degrees[k % 3];
    std::string id = "rand" + std::string(k < 10 ? "0" : "") + std::to_string(k) + "-d" + std::to_string(d);
    suite.push_back({std::move(id), Polynomial::from_roots(random_disk_roots(d, 0.05, rng))});
  }
  return suite;
}

}  // namespace alphastep
