#pragma once

// Smale's point estimates: alpha, gamma, the approximate-zero certificate,
// Newton's operator and a direct check of quadratic contraction.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "alphastep/numeric_core.hpp"

namespace alphastep {

/// Threshold used by the stopping rule of the path-lifting algorithm.
inline constexpr double kCertifyThreshold = 0.1307;

/// |f'(z)| below this is treated as a critical point.
inline constexpr double kCriticalGuard = 1e-300;

struct AlphaData {
  double alpha = 0.0;
  double gamma = 0.0;
  /// |f(z)/f'(z)|, the Newton step length.
  double beta_newton = 0.0;
  /// Index j in 2..d attaining the max; 0 for linear polynomials.
  int argmax_j = 0;
};

struct Certificate {
  Complex point;
  double alpha_value = 0.0;
  double threshold = kCertifyThreshold;
  std::optional<std::string> trace_id;
};

/// alpha/gamma from Taylor coefficients b_j = f^(j)(z)/j!, j = 0..d. Works for
/// non-monic input, which the scaling-law tests rely on.
inline AlphaData alpha_from_taylor(std::span<const Complex> taylor) {
  if (taylor.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least f and f'");
  const double deriv_abs = std::abs(taylor[1]);
  if (!(deriv_abs >= kCriticalGuard)) throw Error(ErrorCode::CriticalPointInput, "f'(z) vanishes");

  AlphaData out;
  out.beta_newton = std::abs(taylor[0]) / deriv_abs;
  const double log_deriv = std::log(deriv_abs);
  if (taylor.size() > 2) out.argmax_j = 2;
  for (std::size_t j = 2; j < taylor.size(); ++j) {
    const double coeff_abs = std::abs(taylor[j]);
    if (coeff_abs < kCriticalGuard) continue;
    const double term = std::exp((std::log(coeff_abs) - log_deriv) / static_cast<double>(j - 1));
    if (term > out.gamma) {
      out.gamma = term;
      out.argmax_j = static_cast<int>(j);
    }
  }
  out.alpha = out.beta_newton * out.gamma;
  return out;
}

inline AlphaData alpha_gamma(const Polynomial& p, Complex z) {
  require_finite(z, "evaluation point is not finite");
  return alpha_from_taylor(taylor_coefficients(p.coeffs(), z, p.degree()));
}

/// Derivative-free bound gamma(z) < ||f|| phi_d'(|z|)^2 / (|f'(z)| phi_d(|z|)),
/// with phi_d(x) = sum_{i=0}^d x^i.
inline double gamma_upper_bound(const Polynomial& p, Complex z) {
  require_finite(z, "evaluation point is not finite");
  const auto [value, deriv] = p.value_and_derivative(z);
  (void)value;
  const double deriv_abs = std::abs(deriv);
  if (!(deriv_abs >= kCriticalGuard)) throw Error(ErrorCode::CriticalPointInput, "f'(z) vanishes");
  const double x = std::abs(z);
  double phi = 0.0;
  double phi_prime = 0.0;
  double power = 1.0;
  for (int i = 0; i <= p.degree(); ++i) {
    phi += power;
    if (i < p.degree()) phi_prime += (i + 1) * power;
    power *= x;
  }
  return sup_coeff_norm(p) * phi_prime * phi_prime / (deriv_abs * phi);
}

/// Certificate iff alpha(z) <= threshold.
inline std::optional<Certificate> certify(const Polynomial& p, Complex z,
                                          double threshold = kCertifyThreshold) {
  const AlphaData a = alpha_gamma(p, z);
  if (a.alpha <= threshold) return Certificate{z, a.alpha, threshold, std::nullopt};
  return std::nullopt;
}

inline Complex newton_step(const Polynomial& p, Complex z) {
  require_finite(z, "evaluation point is not finite");
  const auto [value, deriv] = p.value_and_derivative(z);
  if (!(std::abs(deriv) >= kCriticalGuard)) throw Error(ErrorCode::CriticalPointInput, "f'(z) vanishes");
  return z - value / deriv;
}

struct ContractionCheck {
  bool holds = true;
  /// ratios[n-1] = |z_{n+1}-z_n| / ((1/2)^(2^n-1) |z_1-z_0|) for n = 1..steps-1.
  std::vector<double> ratios;
  std::vector<Complex> orbit;
};

/// Increments below this absolute size count as satisfied (roundoff floor).
inline constexpr double kContractionFloor = 1e-9;

/// Checks |z_{n+1}-z_n| <= (1/2)^(2^n-1) |z_1-z_0| for 1 <= n < steps along
/// the Newton orbit of z0.
inline ContractionCheck verify_quadratic_contraction(const Polynomial& p, Complex z0, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "steps must be >= 2");
  ContractionCheck out;
  out.orbit.push_back(z0);
  for (int n = 0; n < steps; ++n) {
    const Complex z = out.orbit.back();
    const auto [value, deriv] = p.value_and_derivative(z);
    if (value == Complex{0.0, 0.0}) {
      out.orbit.push_back(z);
      continue;
    }
    if (!(std::abs(deriv) >= kCriticalGuard)) {
      throw Error(ErrorCode::CriticalPointEncountered, "Newton orbit hit a critical point");
    }
    out.orbit.push_back(z - value / deriv);
  }
  const double first = std::abs(out.orbit[1] - out.orbit[0]);
  for (int n = 1; n < steps; ++n) {
    const double inc = std::abs(out.orbit[static_cast<std::size_t>(n) + 1] - out.orbit[static_cast<std::size_t>(n)]);
    const double allowed = std::ldexp(first, -((1 << n) - 1));
    const double ratio = allowed > 0.0 ? inc / allowed : (inc > 0.0 ? INFINITY : 0.0);
    out.ratios.push_back(ratio);
    if (inc > allowed && inc > kContractionFloor) out.holds = false;
  }
  return out;
}

struct AlphaZero {
  /// Root of (2r^2 - 4r + 1)^2 - 2r = 0 in [0.13, 0.14].
  double root = 0.0;
  double working_threshold = kCertifyThreshold;
};

inline double alpha0_residual(double r) {
  const double q = 2.0 * r * r - 4.0 * r + 1.0;
  return q * q - 2.0 * r;
}

/// Bisection to 1e-15.
inline AlphaZero compute_alpha0() {
  double lo = 0.13;
  double hi = 0.14;
  // residual is positive at lo and negative at hi
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (alpha0_residual(mid) > 0.0) lo = mid; else hi = mid;
  }
  return AlphaZero{0.5 * (lo + hi), kCertifyThreshold};
}

inline const AlphaZero& alpha0_constant() {
  static const AlphaZero value = compute_alpha0();
  return value;
}

}  // namespace alphastep
