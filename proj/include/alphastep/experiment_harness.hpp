#pragma once

// Sweeps over starting angles, quadrature identities on circles, audits of
// the per-step inequalities along a trace, and the two cost bounds that
// integrate or sum over the Voronoi cells a lifted ray meets.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "alphastep/branch_lift.hpp"
#include "alphastep/critical_geometry.hpp"
#include "alphastep/numeric_core.hpp"
#include "alphastep/parallel.hpp"
#include "alphastep/path_lift.hpp"
#include "alphastep/random.hpp"

namespace alphastep {

inline constexpr double kDeltaConstant = 0.0158;
inline constexpr double kFvsW = 1.1376;
inline constexpr double kWShrink = 0.41982;
inline constexpr double kUBound = 1.0 / 15.0 + 0.0158;
inline constexpr double kJumpRatio = 1.0 / 66.0;
inline constexpr double kFinalGuideRatio = 1.0 / 87.0;
inline constexpr double kStepConstant = 67.0;

/// 67 (13.1 + Lambda_f)
inline double average_cost_bound(double Lambda_f) { return kStepConstant * (13.1 + Lambda_f); }

/// Trapezoid rule for the integral of log|f(r e^{2 pi i t})| over [0, 1).
inline double quadrature_log_abs_f(const Polynomial& p, double r, int nodes) {
  if (!(r > 0.0) || nodes < 1) throw Error(ErrorCode::InvalidArgument, "need r > 0 and nodes >= 1");
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    sum += std::log(std::abs(p(std::polar(r, 2.0 * std::numbers::pi * k / nodes))));
  }
  return sum / nodes;
}

/// Trapezoid rule for the integral over [0, 1) of the argument speed, which
/// should be 2 pi d.
inline double winding_quadrature(const Polynomial& p, double r, int nodes) {
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) sum += arg_speed(p, r, static_cast<double>(k) / nodes);
  return sum / nodes;
}

/// Root the point z converges to under six Newton steps.
inline std::size_t converged_root(const Polynomial& p, const CriticalProfile& profile, Complex z) {
  for (int k = 0; k < 6; ++k) {
    const auto [value, deriv] = p.value_and_derivative(z);
    if (value == Complex{0.0, 0.0} || !(std::abs(deriv) >= kCriticalGuard)) break;
    const Complex next = z - value / deriv;
    if (!is_finite(next)) break;
    z = next;
  }
  return profile.nearest_root(z);
}

/// |w_N| / rho_zeta for a certified trace; +inf when rho is infinite.
inline double final_guide_ratio(const Trace& trace, const CriticalProfile& profile) {
  const std::size_t k = converged_root(profile.polynomial, profile, trace.certificate->point);
  const double rho = profile.rho[k];
  if (!std::isfinite(rho)) return std::numeric_limits<double>::infinity();
  return std::abs(trace.w_final) / rho;
}

struct SweepEntry {
  double t = 0.0;
  /// Angle actually run after a singular-start perturbation.
  double t_used = 0.0;
  int N = 0;
  std::string outcome;
  std::optional<int> beta_plus;
  std::optional<double> wN_ratio;
};

struct SweepFailure {
  double t = 0.0;
  std::string outcome;
};

struct SweepReport {
  std::string poly_id;
  int d = 0;
  double r = 0.0;
  int M = 0;
  std::vector<SweepEntry> entries;
  std::vector<int> costs;
  double mean_cost = 0.0;
  int certified = 0;
  double bound = 0.0;
  std::vector<SweepFailure> failures;
  double beta_plus_mean = 0.0;
  double wN_over_rho_min = std::numeric_limits<double>::infinity();
  /// Kept only when requested; traces[k] belongs to entries[k].
  std::vector<std::optional<Trace>> traces;

  bool within_bound() const { return mean_cost <= bound; }
};

struct SweepOptions {
  std::string poly_id = "poly";
  bool probes = true;
  bool keep_traces = false;
  int probe_nodes = 1024;
  /// Draw t uniformly from this seed (sorted) instead of the midpoint rule.
  std::optional<std::uint64_t> seed;
};

/// Runs the algorithm from r e^{2 pi i t}, t = (k + 1/2)/M, r = 1 + C/d. Runs
/// that fail are listed and excluded from the mean. A singular start is
/// retried once at t + 1e-9.
inline SweepReport sweep_average_cost(const Polynomial& p, int M, const RunConfig& cfg,
                                      const CriticalProfile& profile, const SweepOptions& opts = {}) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  if (profile.polynomial.fingerprint() != p.fingerprint()) {
    throw Error(ErrorCode::ProfileMismatch, "profile belongs to another polynomial");
  }
  const int d = p.degree();
  RunConfig run_cfg = cfg;
  if (!run_cfg.max_steps) run_cfg.max_steps = RunConfig::budget_from_conditioning(profile.log_K_f, d);

  SweepReport report;
  report.poly_id = opts.poly_id;
  report.d = d;
  report.r = 1.0 + cfg.C / d;
  report.M = M;
  report.bound = average_cost_bound(profile.Lambda_f);
  report.entries.resize(static_cast<std::size_t>(M));
  report.traces.resize(static_cast<std::size_t>(M));

  std::vector<double> angles(static_cast<std::size_t>(M));
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    for (auto& t : angles) t = unit_uniform(rng);
    std::sort(angles.begin(), angles.end());
  } else {
    for (std::size_t k = 0; k < angles.size(); ++k) angles[k] = (static_cast<double>(k) + 0.5) / M;
  }

  parallel_for(static_cast<std::size_t>(M), [&](std::size_t k) {
    SweepEntry& e = report.entries[k];
    e.t = angles[k];
    e.t_used = e.t;
    std::optional<Trace> trace;
    for (int attempt = 0; attempt < 2 && !trace; ++attempt) {
      try {
        trace = run_any(p, choose_start(d, e.t_used, cfg.C), run_cfg);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::SingularStart) throw;
        if (attempt == 0) e.t_used += 1e-9;
      }
    }
    if (!trace) {
      e.outcome = "SingularStart";
      return;
    }
    e.N = trace->step_count();
    e.outcome = std::string(to_string(trace->outcome));
    if (trace->outcome == Outcome::Certified) e.wN_ratio = final_guide_ratio(*trace, profile);
    if (opts.probes) {
      try {
        const RayProbe probe = ray_probe(p, e.t_used, cfg.C, profile, opts.probe_nodes);
        if (!probe.partial) e.beta_plus = probe.beta_plus;
      } catch (const Error&) {
      }
    }
    if (opts.keep_traces) report.traces[k] = std::move(trace);
  });

  long total = 0;
  int probed = 0;
  long beta_total = 0;
  for (const auto& e : report.entries) {
    report.costs.push_back(e.N);
    if (e.outcome == "Certified") {
      total += e.N;
      ++report.certified;
      if (e.wN_ratio) report.wN_over_rho_min = std::min(report.wN_over_rho_min, *e.wN_ratio);
    } else {
      report.failures.push_back({e.t, e.outcome});
    }
    if (e.beta_plus) {
      ++probed;
      beta_total += *e.beta_plus;
    }
  }
  report.mean_cost = report.certified > 0 ? static_cast<double>(total) / report.certified : 0.0;
  report.beta_plus_mean = probed > 0 ? static_cast<double>(beta_total) / probed : 0.0;
  return report;
}

inline SweepReport sweep_average_cost(const Polynomial& p, int M, const RunConfig& cfg,
                                      const SweepOptions& opts = {}) {
  return sweep_average_cost(p, M, cfg, critical_profile(p), opts);
}

struct StepAudit {
  int n = 0;
  bool delta_ok = true;
  /// The remaining checks apply only to steps with alpha_n above the threshold.
  std::optional<bool> f_vs_w_ok;
  std::optional<bool> w_shrink_ok;
  std::optional<bool> u_ok;
  /// Nearest blocking distance at w_n and at f_n on the branch of z_n.
  double r_n = std::numeric_limits<double>::infinity();
  double R_n = std::numeric_limits<double>::infinity();
  std::optional<double> jump_ratio;
  /// (|f_n| / alpha_n) / R_n
  std::optional<double> radius_ratio;
  bool flagged = false;
};

struct AuditReport {
  std::vector<StepAudit> steps;
  bool delta_ok = true;
  bool f_vs_w_ok = true;
  bool w_shrink_ok = true;
  bool u_ok = true;
  double jump_ratio_min = std::numeric_limits<double>::infinity();
  bool jump_ok = true;
  int flagged_steps = 0;
  /// Hold fractions of three readings of the two-sided bound on |f_n|/alpha_n
  /// in units of R_n: [1/4, 3-2sqrt2], [3-2sqrt2, 1/4], [1/4, 1/(3-2sqrt2)].
  double radius_ratio_forward_holds = 1.0;
  double radius_ratio_reversed_holds = 1.0;
  double radius_ratio_inverse_holds = 1.0;
  int radius_ratio_samples = 0;
  std::optional<std::size_t> root_index;
  double rho = std::numeric_limits<double>::infinity();
  double wN_ratio = std::numeric_limits<double>::infinity();
  bool wN_ok = true;

  bool all_pass() const { return delta_ok && f_vs_w_ok && w_shrink_ok && u_ok && jump_ok && wN_ok; }
};

/// Evaluates the per-step inequalities along a certified classic trace. The
/// branch is followed from (w_0, z_0) down the ray; r_n is the nearest
/// blocking distance at w_n and R_n the one at f_n, reached from w_n.
inline AuditReport audit_trace(const Trace& trace, const CriticalProfile& profile) {
  if (trace.poly_fingerprint != profile.polynomial.fingerprint()) {
    throw Error(ErrorCode::ProfileMismatch, "trace and profile polynomials differ");
  }
  if (trace.outcome != Outcome::Certified) throw Error(ErrorCode::InvalidArgument, "trace is not certified");
  const Polynomial& p = profile.polynomial;
  const double tol = 1e-10;
  const double lo = 0.25;
  const double hi = 3.0 - 2.0 * std::numbers::sqrt2;

  AuditReport out;
  std::optional<BranchWalker> walker;
  if (!profile.critical.empty()) {
    walker.emplace(p, profile.critical, trace.steps.front().w, trace.steps.front().z);
  }
  int fwd = 0;
  int rev = 0;
  int inv = 0;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const TraceStep& s = trace.steps[k];
    StepAudit a;
    a.n = s.n;
    const double f_abs = std::abs(s.f_of_z);
    a.delta_ok = s.alpha > 0.0 ? s.delta <= kDeltaConstant * f_abs / s.alpha + tol : s.delta <= tol;
    out.delta_ok = out.delta_ok && a.delta_ok;

    if (s.jump) {
      const double w_abs = std::abs(s.w);
      const double w_next = std::abs(trace.steps[k + 1].w);
      a.f_vs_w_ok = f_abs <= kFvsW * w_abs + tol;
      a.w_shrink_ok = w_next >= kWShrink * w_abs - tol;
      a.u_ok = *s.u <= kUBound + tol;
      out.f_vs_w_ok = out.f_vs_w_ok && *a.f_vs_w_ok;
      out.w_shrink_ok = out.w_shrink_ok && *a.w_shrink_ok;
      out.u_ok = out.u_ok && *a.u_ok;

      if (walker) {
        if (!walker->move_to(s.w)) {
          throw Error(ErrorCode::ContinuationStall, "branch continuation along the ray stalled");
        }
        const NearestBranchPoint near_w = walker->nearest();
        BranchWalker at_f = *walker;
        const bool reached = at_f.move_to(s.f_of_z);
        const NearestBranchPoint near_f = at_f.nearest();
        a.r_n = near_w.radius;
        a.R_n = near_f.radius;
        a.flagged = near_w.flagged || near_f.flagged || !reached ||
                    std::abs(at_f.z() - s.z) > 1e-6 * (1.0 + std::abs(s.z));
        if (std::isfinite(a.r_n)) a.jump_ratio = *s.jump / a.r_n;
        if (std::isfinite(a.R_n) && a.R_n > 0.0) a.radius_ratio = f_abs / s.alpha / a.R_n;
        if (a.flagged) {
          ++out.flagged_steps;
        } else {
          if (a.jump_ratio) {
            out.jump_ratio_min = std::min(out.jump_ratio_min, *a.jump_ratio);
            if (*a.jump_ratio < kJumpRatio - 1e-9) out.jump_ok = false;
          }
          if (a.radius_ratio) {
            const double q = *a.radius_ratio;
            ++out.radius_ratio_samples;
            fwd += (q >= lo && q <= hi) ? 1 : 0;
            rev += (q >= hi && q <= lo) ? 1 : 0;
            inv += (q >= lo && q <= 1.0 / hi) ? 1 : 0;
          }
        }
      }
    }
    out.steps.push_back(a);
  }
  if (out.radius_ratio_samples > 0) {
    out.radius_ratio_forward_holds = static_cast<double>(fwd) / out.radius_ratio_samples;
    out.radius_ratio_reversed_holds = static_cast<double>(rev) / out.radius_ratio_samples;
    out.radius_ratio_inverse_holds = static_cast<double>(inv) / out.radius_ratio_samples;
  }

  const std::size_t root = converged_root(p, profile, trace.certificate->point);
  out.root_index = root;
  out.rho = profile.rho[root];
  if (std::isfinite(out.rho)) {
    out.wN_ratio = std::abs(trace.w_final) / out.rho;
    out.wN_ok = out.wN_ratio >= kFinalGuideRatio;
  }
  return out;
}

namespace detail {

/// Integral of |dy| / |y - v| over the segment [a, b].
inline double inverse_distance_integral(Complex a, Complex b, Complex v) {
  const double len = std::abs(b - a);
  if (len == 0.0) return 0.0;
  const Complex u = (b - a) / len;
  const Complex rel = (v - a) * std::conj(u);
  const double sp = rel.real();
  const double x = std::abs(rel.imag());
  if (x == 0.0) {
    if (sp >= 0.0 && sp <= len) return std::numeric_limits<double>::infinity();
    return std::abs(std::log(std::abs(len - sp) / std::abs(sp)));
  }
  return std::asinh((len - sp) / x) - std::asinh(-sp / x);
}

}  // namespace detail

/// 67 times the integral of |dy| / r_y over [w_N, w_0], where r_y is the
/// distance to the nearest blocking critical value on the lifted branch.
/// Each of the `nodes` subintervals is integrated exactly against the
/// nearest value at either end, taking the larger result.
inline double cost_integral_bound(const Trace& trace, const CriticalProfile& profile, int nodes = 2048) {
  if (trace.poly_fingerprint != profile.polynomial.fingerprint()) {
    throw Error(ErrorCode::ProfileMismatch, "trace and profile polynomials differ");
  }
  if (profile.critical.empty() || trace.steps.empty()) return 0.0;
  const Complex w0 = trace.steps.front().w;
  const Complex wN = trace.w_final;
  if (w0 == wN) return 0.0;
  BranchWalker walker(profile.polynomial, profile.critical, w0, trace.steps.front().z);
  std::optional<std::size_t> prev = walker.nearest().index;
  Complex y_prev = w0;
  double integral = 0.0;
  for (int k = 1; k <= nodes; ++k) {
    const Complex y = w0 + (wN - w0) * (static_cast<double>(k) / nodes);
    if (!walker.move_to(y)) throw Error(ErrorCode::ContinuationStall, "branch continuation stalled");
    const std::optional<std::size_t> cur = walker.nearest().index;
    double piece = 0.0;
    if (prev) piece = std::max(piece, detail::inverse_distance_integral(y_prev, y, profile.critical[*prev].value));
    if (cur) piece = std::max(piece, detail::inverse_distance_integral(y_prev, y, profile.critical[*cur].value));
    integral += piece;
    prev = cur;
    y_prev = y;
  }
  return kStepConstant * integral;
}

/// log((4 + tan|theta|) / (sec|theta| - 1)); +inf at theta = 0.
inline double angle_log_term(double theta) {
  const double a = std::abs(theta);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  const double s = std::sin(0.5 * a);
  const double sec_minus_one = 2.0 * s * s / std::cos(a);
  return std::log((4.0 + std::tan(a)) / sec_minus_one);
}

/// Sum of angle_log_term over influencing critical values with |theta| < pi/2.
inline double angle_log_sum(const RayProbe& probe) {
  double sum = 0.0;
  for (const auto& [index, theta] : probe.theta_per_critical) {
    (void)index;
    if (std::abs(theta) < std::numbers::pi / 2) sum += angle_log_term(theta);
  }
  return sum;
}

/// 67 [log(|w_0|/|w_N|) + beta+ log(9/4) + angle_log_sum].
inline double costestimate_bound(const Trace& trace, const RayProbe& probe, const CriticalProfile& profile) {
  if (trace.poly_fingerprint != profile.polynomial.fingerprint()) {
    throw Error(ErrorCode::ProfileMismatch, "trace and profile polynomials differ");
  }
  if (trace.steps.empty()) throw Error(ErrorCode::InvalidArgument, "empty trace");
  const double w0 = std::abs(trace.steps.front().w);
  const double wN = std::abs(trace.w_final);
  return kStepConstant * (std::log(w0 / wN) + probe.beta_plus * std::log(9.0 / 4.0) + angle_log_sum(probe));
}

struct SampleStats {
  double mean = 0.0;
  /// Sample standard deviation and standard error of the mean.
  double stddev = 0.0;
  double stderr_mean = 0.0;
  int samples = 0;
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats s;
  s.samples = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= s.samples;
  if (s.samples > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (s.samples - 1));
    s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(s.samples));
  }
  return s;
}

struct GeometryAverages {
  SampleStats beta_plus;
  SampleStats angle_log;
  int partial_probes = 0;
  /// (1 + r)/r and 3 (1 + r)/r
  double beta_bound = 0.0;
  double angle_bound = 0.0;
};

/// Ray probes at t = (k + 1/2)/M averaged over the circle of radius 1 + C/d.
/// Partial probes are excluded.
inline GeometryAverages averaged_geometry(const Polynomial& p, const CriticalProfile& profile, int M, double C,
                                          int nodes = 1024) {
  std::vector<std::optional<RayProbe>> probes(static_cast<std::size_t>(M));
  parallel_for(probes.size(), [&](std::size_t k) {
    RayProbe probe = ray_probe(p, (static_cast<double>(k) + 0.5) / M, C, profile, nodes);
    if (!probe.partial) probes[k] = std::move(probe);
  });
  GeometryAverages out;
  std::vector<double> betas;
  std::vector<double> angles;
  for (const auto& probe : probes) {
    if (!probe) {
      ++out.partial_probes;
      continue;
    }
    betas.push_back(probe->beta_plus);
    angles.push_back(angle_log_sum(*probe));
  }
  out.beta_plus = sample_stats(betas);
  out.angle_log = sample_stats(angles);
  const double r = 1.0 + C / p.degree();
  out.beta_bound = (1.0 + r) / r;
  out.angle_bound = 3.0 * (1.0 + r) / r;
  return out;
}

/// Fraction of t in [0, 1) (midpoint samples) where Arg(f(r e^{2 pi i t}) / f(c))
/// lies within A of 0 for every critical point c.
inline double bad_angle_measure(const Polynomial& p, const CriticalProfile& profile, double A, double r,
                                int samples) {
  if (profile.critical.empty()) return 1.0;
  int bad = 0;
  for (int k = 0; k < samples; ++k) {
    const Complex w = p(std::polar(r, 2.0 * std::numbers::pi * (k + 0.5) / samples));
    bool all = true;
    for (const auto& c : profile.critical) {
      if (std::abs(std::arg(w / c.value)) >= A) {
        all = false;
        break;
      }
    }
    bad += all ? 1 : 0;
  }
  return static_cast<double>(bad) / samples;
}

/// Fraction of t (midpoint samples) with log|f(r e^{2 pi i t})| < d log r.
inline double below_mean_measure(const Polynomial& p, double r, int samples) {
  const double level = p.degree() * std::log(r);
  int count = 0;
  for (int k = 0; k < samples; ++k) {
    count += std::log(std::abs(p(std::polar(r, 2.0 * std::numbers::pi * (k + 0.5) / samples)))) < level ? 1 : 0;
  }
  return static_cast<double>(count) / samples;
}

}  // namespace alphastep
