#pragma once

// Critical points of f and analytic continuation of inverse branches of f
// along straight segments in the target plane.
//
// A critical value v is "blocking" for a lifted point (y, z) when the lift of
// the segment [y, v] starting at z runs into the critical point above v. The
// nearest blocking value is the branch point whose Voronoi cell contains the
// lifted point, and its distance is the radius of univalence of the branch.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "alphastep/error.hpp"
#include "alphastep/numeric_core.hpp"
#include "alphastep/root_oracle.hpp"

namespace alphastep {

struct CriticalPoint {
  Complex point;
  int multiplicity = 1;
  Complex value;
  /// |f^(m+1)(c)| / (m+1)!, the leading local coefficient of f - f(c).
  double lead = 0.0;
};

/// Oracle candidates closer than this are one critical point.
inline constexpr double kClusterTolerance = 1e-7;

namespace detail {

/// sum |a_i| |z|^i, the scale of Horner's rounding error at z.
inline double abs_horner(std::span<const Complex> coeffs, Complex z) {
  const double x = std::abs(z);
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + std::abs(*it);
  return acc;
}

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

inline std::vector<std::vector<std::size_t>> cluster_by_distance(std::span<const Complex> pts, double tol) {
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (std::abs(pts[i] - pts[j]) <= tol) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(pts.size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t r = find_root(parent, i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

inline Complex centroid(std::span<const Complex> pts, const std::vector<std::size_t>& idx) {
  Complex sum{0.0, 0.0};
  for (auto i : idx) sum += pts[i];
  return sum / static_cast<double>(idx.size());
}

/// A loose group of oracle roots is a numerically multiple root when the
/// first m Taylor coefficients at its centroid are at roundoff level.
inline bool is_roundoff_cluster(std::span<const Complex> coeffs, Complex c, std::size_t m) {
  const auto taylor = taylor_coefficients(coeffs, c, static_cast<int>(coeffs.size()) - 1);
  double scale = 0.0;
  double power = 1.0;
  for (const auto& a : coeffs) {
    scale += std::abs(a) * power;
    power *= 1.0 + std::abs(c);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (std::abs(taylor[k]) > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace detail

/// Critical points with multiplicities (summing to d-1), values f(c) and the
/// local leading coefficient. Empty for linear polynomials.
inline std::vector<CriticalPoint> find_critical_points(const Polynomial& p) {
  std::vector<CriticalPoint> out;
  const int d = p.degree();
  if (d < 2) return out;
  auto q = derivative_coeffs(p.coeffs());
  for (auto& c : q) c /= static_cast<double>(d);

  const RootOracleResult oracle = aberth_roots(q);
  if (!oracle.certified) throw Error(ErrorCode::OracleFailure, "critical points could not be certified");
  const auto& pts = oracle.roots;

  // Tight clusters merge unconditionally; loose ones only when the
  // derivative is numerically multiple at their centroid.
  std::vector<std::vector<std::size_t>> groups;
  for (auto& loose : detail::cluster_by_distance(pts, 1e-2)) {
    if (loose.size() > 1 && detail::is_roundoff_cluster(q, detail::centroid(pts, loose), loose.size())) {
      groups.push_back(std::move(loose));
      continue;
    }
    std::vector<Complex> sub;
    for (auto i : loose) sub.push_back(pts[i]);
    for (auto& tight : detail::cluster_by_distance(sub, kClusterTolerance)) {
      std::vector<std::size_t> mapped;
      for (auto i : tight) mapped.push_back(loose[i]);
      groups.push_back(std::move(mapped));
    }
  }

  for (const auto& g : groups) {
    CriticalPoint cp;
    cp.multiplicity = static_cast<int>(g.size());
    cp.point = detail::centroid(pts, g);
    if (cp.multiplicity == 1) {
      for (int k = 0; k < 4; ++k) {
        const auto [value, deriv] = horner_with_derivative(q, cp.point);
        if (std::abs(deriv) < 1e-14) break;
        const Complex step = value / deriv;
        cp.point -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(cp.point))) break;
      }
    }
    cp.value = p(cp.point);
    const auto taylor = taylor_coefficients(p.coeffs(), cp.point, std::min(d, cp.multiplicity + 1));
    cp.lead = std::abs(taylor.back());
    out.push_back(cp);
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.point.real() != b.point.real()) return a.point.real() < b.point.real();
    return a.point.imag() < b.point.imag();
  });
  return out;
}

struct LiftResult {
  Complex z;
  bool ok = true;
  int steps = 0;
};

/// Continues the inverse branch through (y_from, z_from) along [y_from, y_to]
/// by Euler prediction and Newton correction. Steps never exceed a fifth of
/// the distance to the nearest critical value, which bounds them by the
/// radius of univalence of the branch.
inline LiftResult lift_segment(const Polynomial& p, std::span<const Complex> critical_values, Complex z_from,
                               Complex y_from, Complex y_to) {
  LiftResult out{z_from, true, 0};
  if (y_to == y_from) return out;

  // Distances are measured from the current point rather than accumulated,
  // so long segments that end near 0 keep their resolution.
  Complex y = y_from;
  Complex z = z_from;
  double h = std::abs(y_to - y_from);
  bool done = false;
  while (!done) {
    const double remaining = std::abs(y_to - y);
    const Complex dir = (y_to - y) / remaining;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& v : critical_values) dist = std::min(dist, std::abs(y - v));
    h = std::min({2.0 * h, remaining, 0.2 * dist});
    const double floor = std::min(1e-15 * (1.0 + std::abs(y)), 0.5 * remaining);
    for (;;) {
      if (h < floor) {
        out.ok = false;
        out.z = z;
        return out;
      }
      const bool last = h >= remaining;
      const Complex y_new = last ? y_to : y + h * dir;
      const auto [fz, dfz] = p.value_and_derivative(z);
      (void)fz;
      if (!(std::abs(dfz) > 0.0)) {
        h *= 0.5;
        continue;
      }
      const Complex predicted = z + (y_new - y) / dfz;
      Complex corrected = predicted;
      bool converged = false;
      double noise = 0.0;
      for (int it = 0; it < 20; ++it) {
        const auto [fv, dv] = p.value_and_derivative(corrected);
        if (!(std::abs(dv) > 0.0)) break;
        const Complex dz = (fv - y_new) / dv;
        // Horner roundoff in f turns into this much uncertainty in z.
        noise = 8.0 * std::numeric_limits<double>::epsilon() * detail::abs_horner(p.coeffs(), corrected) /
                std::abs(dv);
        corrected -= dz;
        if (!is_finite(corrected)) break;
        if (std::abs(dz) <= std::max(1e-12 * (1.0 + std::abs(corrected)), noise)) {
          converged = true;
          break;
        }
      }
      const double predicted_step = std::abs(predicted - z);
      const double slack = std::max(1e-12 * (1.0 + std::abs(z)), 2.0 * noise);
      if (converged && std::abs(corrected - predicted) <= 0.5 * predicted_step + slack) {
        z = corrected;
        y = y_new;
        done = last;
        ++out.steps;
        break;
      }
      h *= 0.5;
    }
  }
  out.z = z;
  return out;
}

/// Relative distance to v at which a blocking lift is stopped and inspected.
inline constexpr double kBlockingApproach = 1e-6;

/// Whether the lift of [y, f(c)] from z ends at the critical point c. nullopt
/// when the continuation stalls.
inline std::optional<bool> reaches_critical(const Polynomial& p, std::span<const CriticalPoint> critical,
                                            std::span<const Complex> critical_values, Complex z, Complex y,
                                            std::size_t index) {
  const CriticalPoint& c = critical[index];
  const Complex v = c.value;
  const double gap = std::abs(y - v);
  if (gap == 0.0) return std::abs(z - c.point) < 1e-6;
  const Complex y_end = v + kBlockingApproach * (y - v);
  const LiftResult lift = lift_segment(p, critical_values, z, y, y_end);
  if (!lift.ok) return std::nullopt;
  // Near c, |f(z) - v| ~ lead |z - c|^(m+1).
  const double scale = c.lead > 0.0
                           ? std::pow(kBlockingApproach * gap / c.lead, 1.0 / (c.multiplicity + 1))
                           : std::numeric_limits<double>::infinity();
  return std::abs(lift.z - c.point) <= 4.0 * scale;
}

enum class Visibility : std::uint8_t { Clear, Blocking, Unknown };

struct NearestBranchPoint {
  /// Critical point index of the nearest blocking value (lowest index on ties).
  std::optional<std::size_t> index;
  /// Distance to it; +inf when none was found.
  double radius = std::numeric_limits<double>::infinity();
  /// All indices within 1e-12 (relative) of the minimum.
  std::vector<std::size_t> ties;
  /// An unresolved status could hide a nearer branch point.
  bool flagged = false;
};

namespace detail {

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double distance_to_segment(Complex q, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(q - a);
  double t = ((q - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(q - (a + t * ab));
}

/// q inside the closed triangle (a, b, c) or within eta of its boundary.
inline bool near_triangle(Complex q, Complex a, Complex b, Complex c, double eta) {
  const double o1 = cross(b - a, q - a);
  const double o2 = cross(c - b, q - b);
  const double o3 = cross(a - c, q - c);
  const bool inside = (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0);
  if (inside) return true;
  return distance_to_segment(q, a, b) <= eta || distance_to_segment(q, b, c) <= eta ||
         distance_to_segment(q, c, a) <= eta;
}

}  // namespace detail

/// A lifted point (y, z) on one sheet, with the blocking status of every
/// critical value. Moving the point along a segment transports the statuses:
/// the status of v can only change if another critical value lies in the
/// triangle swept by [y, v], and only those are recomputed.
class BranchWalker {
 public:
  BranchWalker(const Polynomial& p, const std::vector<CriticalPoint>& critical, Complex y, Complex z)
      : poly_(&p), critical_(&critical), y_(y), z_(z) {
    values_.reserve(critical.size());
    for (const auto& c : critical) values_.push_back(c.value);
    status_.resize(critical.size());
    for (std::size_t i = 0; i < critical.size(); ++i) status_[i] = compute_status(i);
  }

  Complex y() const { return y_; }
  Complex z() const { return z_; }
  std::span<const Visibility> statuses() const { return status_; }
  long recomputations() const { return recomputations_; }

  /// Lifts [y, y_new]; false (and unchanged state) if the continuation stalls.
  bool move_to(Complex y_new) {
    if (y_new == y_) return true;
    const LiftResult lift = lift_segment(*poly_, values_, z_, y_, y_new);
    if (!lift.ok) return false;
    const Complex y_old = y_;
    y_ = y_new;
    z_ = lift.z;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Complex v = values_[i];
      const double eta = 1e-9 * (1.0 + std::abs(v));
      bool dirty = status_[i] == Visibility::Unknown;
      for (std::size_t j = 0; j < values_.size() && !dirty; ++j) {
        if (j == i || std::abs(values_[j] - v) <= 1e-12 * (1.0 + std::abs(v))) continue;
        if (detail::near_triangle(values_[j], y_old, y_new, v, eta)) dirty = true;
      }
      if (dirty) status_[i] = compute_status(i);
    }
    return true;
  }

  NearestBranchPoint nearest() const {
    NearestBranchPoint out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (status_[i] != Visibility::Blocking) continue;
      const double dist = std::abs(y_ - values_[i]);
      if (dist < out.radius) {
        out.radius = dist;
        out.index = i;
      }
    }
    if (!out.index) {
      out.flagged = !values_.empty();
      return out;
    }
    const double tie_tol = 1e-12 * std::max(1.0, out.radius);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double dist = std::abs(y_ - values_[i]);
      if (status_[i] == Visibility::Blocking && dist <= out.radius + tie_tol) out.ties.push_back(i);
      if (status_[i] == Visibility::Unknown && dist <= out.radius) out.flagged = true;
    }
    out.index = out.ties.front();
    return out;
  }

 private:
  Visibility compute_status(std::size_t i) {
    ++recomputations_;
    const auto hit = reaches_critical(*poly_, *critical_, values_, z_, y_, i);
    if (!hit) return Visibility::Unknown;
    return *hit ? Visibility::Blocking : Visibility::Clear;
  }

  const Polynomial* poly_;
  const std::vector<CriticalPoint>* critical_;
  std::vector<Complex> values_;
  Complex y_;
  Complex z_;
  std::vector<Visibility> status_;
  long recomputations_ = 0;
};

/// Nearest blocking critical value from (y, z), computed directly by lifting
/// toward every critical value in order of distance. Independent of the
/// status transport in BranchWalker.
inline NearestBranchPoint nearest_branch_point_direct(const Polynomial& p, const std::vector<CriticalPoint>& critical,
                                                      Complex y, Complex z) {
  std::vector<Complex> values;
  for (const auto& c : critical) values.push_back(c.value);
  std::vector<std::size_t> order(critical.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(y - values[a]) < std::abs(y - values[b]); });
  NearestBranchPoint out;
  for (auto i : order) {
    const double dist = std::abs(y - values[i]);
    if (out.index && dist > out.radius + 1e-12 * std::max(1.0, out.radius)) break;
    const auto hit = reaches_critical(p, critical, values, z, y, i);
    if (!hit) {
      out.flagged = true;
      continue;
    }
    if (*hit) {
      if (!out.index) {
        out.index = i;
        out.radius = dist;
      }
      out.ties.push_back(i);
    }
  }
  if (!out.index) out.flagged = !critical.empty();
  if (!out.ties.empty()) {
    std::sort(out.ties.begin(), out.ties.end());
    out.index = out.ties.front();
  }
  return out;
}

}  // namespace alphastep
