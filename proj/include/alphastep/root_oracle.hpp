#pragma once

// Aberth-Ehrlich simultaneous root iteration. This is the independent
// oracle used for critical points and preimage solves; it never calls the
// path-lifting solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "alphastep/numeric_core.hpp"

namespace alphastep {

struct RootOracleResult {
  std::vector<Complex> roots;
  int iterations = 0;
  bool converged = false;
  /// Every root satisfies |p(z)| <= 1e-10 * max(1, ||p||) after polishing.
  bool certified = false;
};

/// Roots of an ascending coefficient list with nonzero leading coefficient.
inline RootOracleResult aberth_roots(std::span<const Complex> coeffs_in, int max_iterations = 2000) {
  const int degree = static_cast<int>(coeffs_in.size()) - 1;
  if (degree < 1) throw Error(ErrorCode::EmptyInput, "root oracle needs degree >= 1");
  const Complex lead = coeffs_in.back();
  if (lead == Complex{0.0, 0.0}) throw Error(ErrorCode::InvalidArgument, "leading coefficient is zero");

  std::vector<Complex> coeffs(coeffs_in.begin(), coeffs_in.end());
  for (auto& c : coeffs) c /= lead;

  double norm = 0.0;
  for (const auto& c : coeffs) norm = std::max(norm, std::abs(c));
  const double residual_tol = 1e-10 * std::max(1.0, norm);

  RootOracleResult result;
  const auto n = static_cast<std::size_t>(degree);

  // Initial points on a circle around the root centroid, radius from the
  // Fujiwara-style bound of the recentred polynomial.
  const Complex centroid = -coeffs[n - 1] / static_cast<double>(degree);
  const auto shifted = taylor_coefficients(coeffs, centroid, degree);
  double radius = 0.0;
  for (int k = 0; k < degree; ++k) {
    const double a = std::abs(shifted[static_cast<std::size_t>(k)]);
    if (a > 0.0) radius = std::max(radius, std::pow(a, 1.0 / static_cast<double>(degree - k)));
  }
  if (radius == 0.0) {
    result.roots.assign(n, centroid);
    result.converged = true;
    result.certified = std::abs(horner(coeffs, centroid)) <= residual_tol;
    return result;
  }

  result.roots.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / degree + 0.4;
    result.roots[k] = centroid + radius * std::polar(1.0, angle);
  }

  // A root is frozen once its step is negligible or its residual is at the
  // rounding level of Horner's rule.
  std::vector<char> frozen(n, 0);
  auto& z = result.roots;
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      const auto [value, deriv] = horner_with_derivative(coeffs, z[i]);
      double magnitude = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) magnitude = magnitude * std::abs(z[i]) + std::abs(*it);
      if (std::abs(value) <= 4.0 * (degree + 1) * 0x1.0p-52 * magnitude) {
        frozen[i] = 1;
        continue;
      }
      Complex repulsion{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && z[i] != z[j]) repulsion += 1.0 / (z[i] - z[j]);
      }
      const Complex newton = value / deriv;
      const Complex step = newton / (1.0 - newton * repulsion);
      if (!is_finite(step)) continue;
      z[i] -= step;
      const double rel = std::abs(step) / (1.0 + std::abs(z[i]));
      if (rel < 1e-15) frozen[i] = 1;
    }
    result.iterations = iter + 1;
    if (std::all_of(frozen.begin(), frozen.end(), [](char f) { return f != 0; })) {
      result.converged = true;
      break;
    }
  }

  // Newton polish wherever the derivative is safely away from zero.
  for (auto& root : z) {
    for (int k = 0; k < 3; ++k) {
      const auto [value, deriv] = horner_with_derivative(coeffs, root);
      if (std::abs(deriv) < 1e-8) break;
      const Complex next = root - value / deriv;
      if (!is_finite(next)) break;
      root = next;
    }
  }

  result.certified = true;
  for (const auto& root : z) {
    if (std::abs(horner(coeffs, root)) > residual_tol) result.certified = false;
  }
  return result;
}

}  // namespace alphastep
