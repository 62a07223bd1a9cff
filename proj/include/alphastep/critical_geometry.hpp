#pragma once

// Geometry of the branched cover of f: critical values, radii of the inverse
// branches at the roots, conditioning aggregates, argument speed on circles,
// and probes of which Voronoi cells a lifted ray crosses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "alphastep/branch_lift.hpp"
#include "alphastep/path_lift.hpp"
#include "alphastep/numeric_core.hpp"
#include "alphastep/root_oracle.hpp"

namespace alphastep {

struct CriticalProfile {
  Polynomial polynomial;
  std::vector<CriticalPoint> critical;
  std::vector<Complex> roots;
  /// rho[k] is the radius of the inverse branch sending 0 to roots[k].
  std::vector<double> rho;
  /// No blocking value was found for this root; rho is the smallest |f(c)|.
  std::vector<bool> rho_fallback;
  double K_f = 1.0;
  double log_K_f = 0.0;
  /// 2 |log K_f| / d
  double Lambda_f = 0.0;
  /// Two distinct critical points share a value within 1e-10.
  bool degenerate_near_multiple = false;

  std::vector<Complex> critical_values() const {
    std::vector<Complex> out;
    for (const auto& c : critical) out.push_back(c.value);
    return out;
  }

  int multiplicity_sum() const {
    int sum = 0;
    for (const auto& c : critical) sum += c.multiplicity;
    return sum;
  }

  /// Index of the root nearest to z.
  std::size_t nearest_root(Complex z) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < roots.size(); ++k) {
      if (std::abs(z - roots[k]) < std::abs(z - roots[best])) best = k;
    }
    return best;
  }
};

/// Roots from the polynomial when known, else from the oracle.
inline std::vector<Complex> roots_of(const Polynomial& p) {
  if (p.has_roots()) {
    auto r = p.roots();
    return {r.begin(), r.end()};
  }
  const RootOracleResult oracle = aberth_roots(p.coeffs());
  if (!oracle.certified) throw Error(ErrorCode::OracleFailure, "roots could not be certified");
  return oracle.roots;
}

struct RhoResult {
  double rho = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> blocking_index;
  bool fallback = false;
};

/// Radius of the inverse branch through (0, zeta): the smallest |v| over
/// critical values v whose radial lift from zeta runs into their critical
/// point.
inline RhoResult rho_of_root(const Polynomial& p, const std::vector<CriticalPoint>& critical, Complex zeta) {
  RhoResult out;
  if (critical.empty()) return out;
  if (std::abs(p(zeta)) > 1e-10 * std::max(1.0, sup_coeff_norm(p))) {
    throw Error(ErrorCode::InvalidArgument, "zeta is not a root");
  }
  std::vector<Complex> values;
  for (const auto& c : critical) values.push_back(c.value);
  std::vector<std::size_t> order(critical.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(values[a]) < std::abs(values[b]); });
  bool stalled = false;
  for (auto i : order) {
    const auto hit = reaches_critical(p, critical, values, zeta, Complex{0.0, 0.0}, i);
    if (!hit) {
      stalled = true;
      continue;
    }
    if (*hit) {
      out.rho = std::abs(values[i]);
      out.blocking_index = i;
      return out;
    }
  }
  if (stalled && !out.blocking_index) {
    throw Error(ErrorCode::ContinuationStall, "radial continuation from a root stalled");
  }
  out.fallback = true;
  out.rho = std::abs(values[order.front()]);
  return out;
}

inline RhoResult rho_of_root(const Polynomial& p, Complex zeta) {
  return rho_of_root(p, find_critical_points(p), zeta);
}

/// Full profile. Linear polynomials get no critical points, rho = +inf and
/// K_f = 1 (empty product).
inline CriticalProfile critical_profile(const Polynomial& p) {
  CriticalProfile prof{p, find_critical_points(p), roots_of(p), {}, {}, 1.0, 0.0, 0.0, false};
  for (std::size_t i = 0; i < prof.critical.size(); ++i) {
    for (std::size_t j = i + 1; j < prof.critical.size(); ++j) {
      if (std::abs(prof.critical[i].value - prof.critical[j].value) < 1e-10) prof.degenerate_near_multiple = true;
    }
  }
  double log_sum = 0.0;
  for (const auto& zeta : prof.roots) {
    const RhoResult r = rho_of_root(p, prof.critical, zeta);
    prof.rho.push_back(r.rho);
    prof.rho_fallback.push_back(r.fallback);
    if (std::isfinite(r.rho)) log_sum -= std::log(r.rho);
  }
  prof.log_K_f = log_sum;
  prof.K_f = std::exp(log_sum);
  prof.Lambda_f = 2.0 * std::abs(log_sum) / p.degree();
  return prof;
}

/// Smallest positive s with C = 8 pi s / (1 - s)^2, or 1/4 when C > 2 pi.
inline double s_r_constant(double C) {
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  if (C > 2.0 * std::numbers::pi) return 0.25;
  // C s^2 - (2C + 8 pi) s + C = 0, smaller root in cancellation-free form.
  const double b = 2.0 * C + 8.0 * std::numbers::pi;
  return 2.0 * C / (b + std::sqrt(b * b - 4.0 * C * C));
}

/// d/dt Arg f(r e^{2 pi i t}) = 2 pi Re sum z / (z - zeta_j).
inline double arg_speed(const Polynomial& p, double r, double t) {
  if (!(r > 1.0)) throw Error(ErrorCode::InvalidArgument, "r must exceed 1");
  const auto roots = p.roots();
  const Complex z = std::polar(r, 2.0 * std::numbers::pi * t);
  double sum = 0.0;
  for (const auto& zeta : roots) sum += (z / (z - zeta)).real();
  return 2.0 * std::numbers::pi * sum;
}

struct RayProbe {
  /// Requested angle and the one actually used after perturbation.
  double t = 0.0;
  double t_used = 0.0;
  Complex z0;
  Complex w0;
  /// (critical index, Arg(f(c)/w0)) for every influencing critical point.
  std::vector<std::pair<std::size_t, double>> theta_per_critical;
  std::vector<std::size_t> influenced;
  int beta = 0;
  int beta_plus = 0;
  /// Continuation stalled or a status stayed unresolved.
  bool partial = false;
};

/// Critical-point indices whose Voronoi cells meet the lift of [y_from, 0]
/// through z_from, sampled at `nodes` equally spaced points.
struct RayInfluence {
  std::vector<std::size_t> influenced;
  bool partial = false;
};

inline RayInfluence trace_influence(const Polynomial& p, const std::vector<CriticalPoint>& critical, Complex y_from,
                                    Complex z_from, int nodes) {
  RayInfluence out;
  if (critical.empty()) return out;
  std::set<std::size_t> seen;
  BranchWalker walker(p, critical, y_from, z_from);
  for (int k = 0; k <= nodes; ++k) {
    const Complex y = y_from * (1.0 - static_cast<double>(k) / nodes);
    if (!walker.move_to(y)) {
      out.partial = true;
      break;
    }
    const NearestBranchPoint near = walker.nearest();
    if (near.flagged) out.partial = true;
    for (auto i : near.ties) seen.insert(i);
  }
  out.influenced.assign(seen.begin(), seen.end());
  return out;
}

/// True if the segment [0, w] passes within tol of a critical value.
inline bool ray_hits_critical_value(const std::vector<CriticalPoint>& critical, Complex w, double tol) {
  for (const auto& c : critical) {
    if (detail::distance_to_segment(c.value, Complex{0.0, 0.0}, w) <= tol) return true;
  }
  return false;
}

/// Signed angle Arg(v / w0) in (-pi, pi].
inline double critical_angle(Complex v, Complex w0) {
  double theta = std::arg(v / w0);
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  return theta;
}

inline RayProbe ray_probe(const Polynomial& p, double t, double C, const CriticalProfile& profile, int nodes = 1024) {
  RayProbe out;
  out.t = t;
  out.t_used = t;
  const int d = p.degree();
  for (int attempt = 0;; ++attempt) {
    out.z0 = choose_start(d, out.t_used, C);
    out.w0 = p(out.z0);
    if (!ray_hits_critical_value(profile.critical, out.w0, 1e-12 * std::abs(out.w0)) || attempt >= 8) break;
    out.t_used += 1e-9;
  }
  if (!std::isfinite(std::abs(out.w0))) throw Error(ErrorCode::NonFiniteInput, "f overflows at the start point");
  const RayInfluence infl = trace_influence(p, profile.critical, out.w0, out.z0, nodes);
  out.partial = infl.partial;
  out.influenced = infl.influenced;
  for (auto i : out.influenced) {
    const double theta = critical_angle(profile.critical[i].value, out.w0);
    out.theta_per_critical.emplace_back(i, theta);
    if (std::abs(theta) < std::numbers::pi / 2) ++out.beta_plus;
  }
  out.beta = static_cast<int>(out.influenced.size());
  return out;
}

struct VoronoiCounts {
  /// counts[i]: number of lifted rays through the cell of critical point i.
  std::vector<int> counts;
  std::vector<Complex> preimages;
  bool flagged = false;
};

/// Lifts the segment [y, 0] through each of the d preimages of y and counts,
/// per critical point, the lifts that cross its Voronoi cell.
inline VoronoiCounts voronoi_multiplicity_probe(const Polynomial& p, Complex y, const CriticalProfile& profile,
                                                int nodes = 1024) {
  VoronoiCounts out;
  out.counts.assign(profile.critical.size(), 0);
  if (y == Complex{0.0, 0.0}) throw Error(ErrorCode::InvalidArgument, "y must be nonzero");
  std::vector<Complex> shifted(p.coeffs().begin(), p.coeffs().end());
  shifted[0] -= y;
  const RootOracleResult oracle = aberth_roots(shifted);
  if (!oracle.certified) throw Error(ErrorCode::OracleFailure, "preimages of y could not be certified");
  out.preimages = oracle.roots;
  if (ray_hits_critical_value(profile.critical, y, 1e-12 * std::abs(y))) out.flagged = true;
  for (const auto& pre : out.preimages) {
    const RayInfluence infl = trace_influence(p, profile.critical, y, pre, nodes);
    if (infl.partial) out.flagged = true;
    for (auto i : infl.influenced) ++out.counts[i];
  }
  return out;
}

}  // namespace alphastep
