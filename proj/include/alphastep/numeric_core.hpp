#pragma once

// Monic complex polynomials: construction from roots or coefficients,
// Horner evaluation and all-derivative evaluation by repeated synthetic
// division (Taylor shift).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alphastep/error.hpp"

namespace alphastep {

using Complex = std::complex<double>;

/// Roots closer than this are treated as a multiple root and rejected.
inline constexpr double kDuplicateRootTolerance = 1e-12;

/// Tolerance on the leading coefficient when accepting coefficient input.
inline constexpr double kMonicTolerance = 1e-12;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(Complex z, const char* what) {
  if (!is_finite(z)) throw Error(ErrorCode::NonFiniteInput, what);
}

/// Horner evaluation of an ascending coefficient list.
inline Complex horner(std::span<const Complex> coeffs, Complex z) {
  Complex acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// Value and first derivative in one Horner pass.
inline std::pair<Complex, Complex> horner_with_derivative(std::span<const Complex> coeffs, Complex z) {
  Complex value{0.0, 0.0};
  Complex deriv{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    deriv = deriv * z + value;
    value = value * z + *it;
  }
  return {value, deriv};
}

/// Taylor coefficients f^(j)(z)/j! for j = 0..k of an arbitrary (not
/// necessarily monic) ascending coefficient list, by k+1 rounds of synthetic
/// division. Entry j is the scaled derivative; callers multiply by j! when
/// they need the true derivative.
inline std::vector<Complex> taylor_coefficients(std::span<const Complex> coeffs, Complex z, int k) {
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 0) throw Error(ErrorCode::EmptyInput, "empty coefficient list");
  if (k < 0 || k > degree) throw Error(ErrorCode::InvalidArgument, "derivative order out of range");
  std::vector<Complex> b(coeffs.begin(), coeffs.end());
  for (int j = 0; j <= k; ++j) {
    for (int i = degree - 1; i >= j; --i) b[i] += z * b[i + 1];
  }
  b.resize(static_cast<std::size_t>(k) + 1);
  return b;
}

/// f(z), f'(z), ..., f^(k)(z) at a point.
struct DerivativeStack {
  std::vector<Complex> values;
  Complex at;

  int order() const { return static_cast<int>(values.size()) - 1; }
};

class Polynomial {
 public:
  /// Expands prod (z - root_j). Roots are retained.
  static Polynomial from_roots(std::vector<Complex> roots) {
    if (roots.empty()) throw Error(ErrorCode::EmptyInput, "no roots given");
    for (const auto& r : roots) require_finite(r, "root is not finite");
    for (std::size_t i = 0; i < roots.size(); ++i) {
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (std::abs(roots[i] - roots[j]) <= kDuplicateRootTolerance) {
          throw Error(ErrorCode::DuplicateRoots,
                      "roots " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
      }
    }
    std::vector<Complex> coeffs{Complex{1.0, 0.0}};
    for (const auto& r : roots) {
      coeffs.push_back(Complex{0.0, 0.0});
      for (std::size_t i = coeffs.size() - 1; i > 0; --i) coeffs[i] = coeffs[i - 1] - r * coeffs[i];
      coeffs[0] = -r * coeffs[0];
    }
    coeffs.back() = Complex{1.0, 0.0};
    Polynomial p;
    p.coeffs_ = std::move(coeffs);
    p.roots_ = std::move(roots);
    return p;
  }

  /// Ascending coefficients; the leading one must equal 1 (within
  /// kMonicTolerance) and is stored as exactly 1.
  static Polynomial from_coeffs(std::vector<Complex> coeffs) {
    if (coeffs.size() < 2) throw Error(ErrorCode::EmptyInput, "need degree >= 1");
    for (const auto& c : coeffs) require_finite(c, "coefficient is not finite");
    if (std::abs(coeffs.back() - Complex{1.0, 0.0}) > kMonicTolerance) {
      throw Error(ErrorCode::NotMonic, "leading coefficient must be 1");
    }
    coeffs.back() = Complex{1.0, 0.0};
    Polynomial p;
    p.coeffs_ = std::move(coeffs);
    return p;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  bool has_roots() const { return roots_.has_value(); }

  std::span<const Complex> roots() const {
    if (!roots_) throw Error(ErrorCode::RootsUnknown, "polynomial was built from coefficients");
    return *roots_;
  }

  /// Attaches externally computed roots (e.g. from the root oracle).
  Polynomial with_roots(std::vector<Complex> roots) const {
    if (static_cast<int>(roots.size()) != degree()) {
      throw Error(ErrorCode::InvalidArgument, "root count does not match degree");
    }
    Polynomial p = *this;
    p.roots_ = std::move(roots);
    return p;
  }

  Complex operator()(Complex z) const { return horner(coeffs_, z); }

  std::pair<Complex, Complex> value_and_derivative(Complex z) const {
    return horner_with_derivative(coeffs_, z);
  }

  /// Membership in the class of monic polynomials with distinct roots in the
  /// open unit disk. Requires known roots.
  bool in_unit_disk_class() const {
    if (!roots_) return false;
    return std::all_of(roots_->begin(), roots_->end(), [](Complex r) { return std::abs(r) < 1.0; });
  }

  /// Stable identity of the coefficient bit patterns (FNV-1a).
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& c : coeffs_) {
      for (double part : {c.real(), c.imag()}) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &part, sizeof bits);
        for (int byte = 0; byte < 8; ++byte) {
          h ^= (bits >> (8 * byte)) & 0xffU;
          h *= 1099511628211ULL;
        }
      }
    }
    return h;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  Polynomial() = default;

  std::vector<Complex> coeffs_;
  std::optional<std::vector<Complex>> roots_;
};

/// True derivatives f^(j)(z), j = 0..k, including the j! factor.
inline DerivativeStack eval_all_derivs(const Polynomial& p, Complex z, int k) {
  require_finite(z, "evaluation point is not finite");
  auto values = taylor_coefficients(p.coeffs(), z, k);
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) {
    factorial *= j;
    values[static_cast<std::size_t>(j)] *= factorial;
  }
  return DerivativeStack{std::move(values), z};
}

/// max_i |a_i|.
inline double sup_coeff_norm(const Polynomial& p) {
  double best = 0.0;
  for (const auto& c : p.coeffs()) best = std::max(best, std::abs(c));
  return best;
}

/// Coefficients of f' (ascending, leading coefficient d).
inline std::vector<Complex> derivative_coeffs(std::span<const Complex> coeffs) {
  std::vector<Complex> out;
  if (coeffs.size() < 2) return out;
  out.reserve(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) out.push_back(coeffs[i] * static_cast<double>(i));
  return out;
}

}  // namespace alphastep
