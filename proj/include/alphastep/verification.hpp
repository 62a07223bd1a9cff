#pragma once

// The verification suite shared by `alphastep verify` and the acceptance
// binary. Each check evaluates one family of properties on the built-in
// polynomials and reports pass/fail with a one-line summary. Report-only
// checks print their numbers and always pass.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alphastep/alpha_theory.hpp"
#include "alphastep/critical_geometry.hpp"
#include "alphastep/experiment_harness.hpp"
#include "alphastep/json_io.hpp"
#include "alphastep/path_lift.hpp"
#include "alphastep/suite.hpp"

namespace alphastep {

struct CheckResult {
  /// Acceptance criterion number; 0 for report-only checks.
  int criterion = 0;
  std::string id;
  bool assertable = true;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  int d_max = 16;
  std::uint64_t seed = kDefaultSuiteSeed;
  /// Empty means every check.
  std::set<std::string> only;
  /// Fail checks that exceed their time budget.
  bool enforce_runtime = false;
  /// Samples per polynomial for the averaged-geometry check.
  int geometry_samples = 1024;
};

struct CheckInfo {
  int criterion;
  std::string id;
  bool assertable;
  /// Time budget in seconds; 0 for none.
  double budget;
};

inline const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> catalog = {
      {1, "constants", true, 0.001},
      {2, "certification", true, 10.0},
      {3, "average-cost", true, 300.0},
      {4, "step-invariants", true, 0.0},
      {5, "final-guide", true, 0.0},
      {6, "jump-ratio", true, 0.0},
      {7, "log-integral", true, 5.0},
      {8, "arg-speed", true, 0.0},
      {9, "voronoi", true, 120.0},
      {10, "averaged-geometry", true, 0.0},
      {11, "cost-integrals", true, 0.0},
      {12, "determinism", true, 0.0},
      {0, "radius-ratio", false, 0.0},
      {0, "bad-angle", false, 0.0},
      {0, "below-mean", false, 0.0},
  };
  return catalog;
}

inline bool is_known_check(const std::string& id) {
  for (const auto& c : check_catalog()) {
    if (c.id == id) return true;
  }
  return false;
}

namespace detail {

inline std::string fmt(double x, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << x;
  return ss.str();
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

class Verifier {
 public:
  explicit Verifier(VerifyOptions opts) : opts_(std::move(opts)) {
    for (auto& e : builtin_suite(opts_.seed)) {
      if (e.polynomial.degree() <= opts_.d_max) suite_.push_back(std::move(e));
    }
  }

  const std::vector<SuiteEntry>& suite() const { return suite_; }

  std::vector<CheckResult> run_all() {
    std::vector<CheckResult> out;
    for (const auto& c : check_catalog()) {
      if (!opts_.only.empty() && !opts_.only.count(c.id)) continue;
      out.push_back(run(c));
    }
    return out;
  }

  CheckResult run(const CheckInfo& info) {
    CheckResult r;
    r.criterion = info.criterion;
    r.id = info.id;
    r.assertable = info.assertable;
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<double> timed;
    try {
      if (info.id == "constants") timed = check_constants(r);
      else if (info.id == "certification") check_certification(r);
      else if (info.id == "average-cost") check_average_cost(r);
      else if (info.id == "step-invariants") check_step_invariants(r);
      else if (info.id == "final-guide") check_final_guide(r);
      else if (info.id == "jump-ratio") check_jump_ratio(r);
      else if (info.id == "log-integral") check_log_integral(r);
      else if (info.id == "arg-speed") check_arg_speed(r);
      else if (info.id == "voronoi") check_voronoi(r);
      else if (info.id == "averaged-geometry") check_averaged_geometry(r);
      else if (info.id == "cost-integrals") check_cost_integrals(r);
      else if (info.id == "determinism") check_determinism(r);
      else if (info.id == "radius-ratio") report_radius_ratio(r);
      else if (info.id == "bad-angle") report_bad_angle(r);
      else if (info.id == "below-mean") report_below_mean(r);
      else throw Error(ErrorCode::InvalidArgument, "unknown check " + info.id);
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = timed ? *timed : detail::seconds_since(t0);
    if (!r.assertable) r.passed = true;
    if (opts_.enforce_runtime && info.budget > 0.0 && r.seconds >= info.budget) {
      r.passed = false;
      r.detail += "; over time budget " + detail::fmt(info.budget) + " s";
    }
    return r;
  }

 private:
  const CriticalProfile& profile(std::size_t k) {
    if (profiles_.empty()) {
      for (const auto& e : suite_) profiles_.push_back(critical_profile(e.polynomial));
    }
    return profiles_[k];
  }

  SweepReport run_sweep(std::size_t k) {
    SweepOptions so;
    so.poly_id = suite_[k].id;
    so.keep_traces = true;
    return sweep_average_cost(suite_[k].polynomial, 64, RunConfig{}, profile(k), so);
  }

  std::vector<SweepReport>& sweeps() {
    if (!sweeps_) {
      sweeps_.emplace();
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t k = 0; k < suite_.size(); ++k) sweeps_->push_back(run_sweep(k));
      sweep_seconds_ = detail::seconds_since(t0);
    }
    return *sweeps_;
  }

  std::vector<std::vector<AuditReport>>& audits() {
    if (!audits_) {
      auto& sw = sweeps();
      audits_.emplace();
      for (std::size_t k = 0; k < sw.size(); ++k) {
        std::vector<AuditReport> per;
        for (const auto& trace : sw[k].traces) {
          if (trace && trace->outcome == Outcome::Certified && trace->mode == Mode::Classic) {
            per.push_back(audit_trace(*trace, profile(k)));
          }
        }
        audits_->push_back(std::move(per));
      }
    }
    return *audits_;
  }

  /// Returns the time of the bisection alone.
  double check_constants(CheckResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    const AlphaZero a0 = compute_alpha0();
    const double bisection_seconds = detail::seconds_since(t0);
    const double s1 = s_r_constant(1.0);
    const double s2pi = s_r_constant(2.0 * std::numbers::pi);
    const double margin = induction_margin(1.0 / 15.0, 0.0158);
    const bool ok_a0 = std::abs(a0.root - 0.13071694) <= 1e-7;
    const bool ok_s1 = s1 > 1.0 / 28.0 && s1 < 0.0370;
    const bool ok_s2 = std::abs(s2pi - (3.0 - std::sqrt(8.0))) <= 1e-10;
    const bool ok_margin = margin < 1.0;
    r.passed = ok_a0 && ok_s1 && ok_s2 && ok_margin;
    r.detail = "alpha0=" + detail::fmt(a0.root, 10) + " s_r(1)=" + detail::fmt(s1, 8) +
               " s_r(2pi)=" + detail::fmt(s2pi, 12) + " margin=" + detail::fmt(margin, 6);
    return bisection_seconds;
  }

  void check_certification(CheckResult& r) {
    std::mt19937_64 rng(opts_.seed ^ 0x5eedc0ffee123ULL);
    const int d_top = std::min(10, std::max(2, opts_.d_max));
    int pairs = 0;
    int accepted = 0;
    int failures = 0;
    while (accepted < 500 && pairs < 50000) {
      const int d = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(d_top - 1));
      const auto roots = random_disk_roots(d, 0.05, rng);
      const Polynomial p = Polynomial::from_roots(roots);
      Complex z;
      if (rng() % 4 == 0) {
        z = std::polar(1.5 * std::sqrt(unit_uniform(rng)), 2.0 * std::numbers::pi * unit_uniform(rng));
      } else {
        const double scale = std::pow(10.0, -4.0 + 3.5 * unit_uniform(rng));
        z = roots[rng() % roots.size()] + std::polar(scale, 2.0 * std::numbers::pi * unit_uniform(rng));
      }
      ++pairs;
      std::optional<Certificate> cert;
      try {
        cert = certify(p, z);
      } catch (const Error&) {
        continue;
      }
      if (!cert) continue;
      ++accepted;
      if (!verify_quadratic_contraction(p, z, 6).holds) ++failures;
    }
    r.passed = accepted >= 500 && failures == 0;
    r.detail = "pairs=" + std::to_string(pairs) + " accepted=" + std::to_string(accepted) +
               " contraction_failures=" + std::to_string(failures);
  }

  void check_average_cost(CheckResult& r) {
    auto& sw = sweeps();
    int violations = 0;
    int failures = 0;
    double worst = 0.0;
    for (const auto& rep : sw) {
      if (!rep.within_bound() || rep.certified == 0) ++violations;
      failures += static_cast<int>(rep.failures.size());
      worst = std::max(worst, rep.mean_cost / rep.bound);
    }
    r.passed = violations == 0;
    r.detail = "polynomials=" + std::to_string(sw.size()) + " violations=" + std::to_string(violations) +
               " failed_runs=" + std::to_string(failures) + " max mean/bound=" + detail::fmt(worst, 4) +
               " sweep_time=" + detail::fmt(sweep_seconds_, 3) + "s";
  }

  void check_step_invariants(CheckResult& r) {
    int traces = 0;
    int steps = 0;
    int bad = 0;
    for (const auto& per : audits()) {
      for (const auto& a : per) {
        ++traces;
        steps += static_cast<int>(a.steps.size());
        bad += (a.delta_ok && a.f_vs_w_ok && a.w_shrink_ok && a.u_ok) ? 0 : 1;
      }
    }
    r.passed = traces > 0 && bad == 0;
    r.detail = "traces=" + std::to_string(traces) + " steps=" + std::to_string(steps) +
               " traces_with_violations=" + std::to_string(bad);
  }

  void check_final_guide(CheckResult& r) {
    int runs = 0;
    int bad = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& per : audits()) {
      for (const auto& a : per) {
        ++runs;
        bad += a.wN_ok ? 0 : 1;
        min_ratio = std::min(min_ratio, a.wN_ratio);
      }
    }
    r.passed = runs > 0 && bad == 0;
    r.detail = "runs=" + std::to_string(runs) + " min |w_N|/rho=" + detail::fmt(min_ratio, 5) +
               " (>= " + detail::fmt(kFinalGuideRatio, 5) + ") violations=" + std::to_string(bad);
  }

  void check_jump_ratio(CheckResult& r) {
    double min_ratio = std::numeric_limits<double>::infinity();
    int flagged = 0;
    for (const auto& per : audits()) {
      for (const auto& a : per) {
        min_ratio = std::min(min_ratio, a.jump_ratio_min);
        flagged += a.flagged_steps;
      }
    }
    r.passed = min_ratio >= kJumpRatio - 1e-9;
    r.detail = "min J/r=" + detail::fmt(min_ratio, 5) + " (>= " + detail::fmt(kJumpRatio, 5) +
               ") flagged_steps=" + std::to_string(flagged);
  }

  void check_log_integral(CheckResult& r) {
    double worst = 0.0;
    int cases = 0;
    for (const auto& e : suite_) {
      const int d = e.polynomial.degree();
      for (double radius : {1.0 + 1.0 / d, 1.5, 2.0}) {
        const double q = quadrature_log_abs_f(e.polynomial, radius, 2048);
        const double exact = d * std::log(radius);
        worst = std::max(worst, std::abs(q - exact) / exact);
        ++cases;
      }
    }
    r.passed = worst <= 1e-6;
    r.detail = "cases=" + std::to_string(cases) + " max relative error=" + detail::fmt(worst, 3);
  }

  void check_arg_speed(CheckResult& r) {
    int violations = 0;
    double worst_winding = 0.0;
    for (const auto& e : suite_) {
      const int d = e.polynomial.degree();
      for (double radius : {1.0 + 1.0 / d, 1.5}) {
        const double lo = 2.0 * std::numbers::pi * d * radius / (radius + 1.0);
        const double hi = 2.0 * std::numbers::pi * d * radius / (radius - 1.0);
        for (int k = 0; k < 1024; ++k) {
          const double s = arg_speed(e.polynomial, radius, k / 1024.0);
          if (s < lo * (1.0 - 1e-12) || s > hi * (1.0 + 1e-12)) ++violations;
        }
        const double winding = winding_quadrature(e.polynomial, radius, 1024);
        worst_winding = std::max(worst_winding, std::abs(winding - 2.0 * std::numbers::pi * d) / (2.0 * std::numbers::pi * d));
      }
    }
    r.passed = violations == 0 && worst_winding <= 1e-6;
    r.detail = "bound_violations=" + std::to_string(violations) +
               " max winding relative error=" + detail::fmt(worst_winding, 3);
  }

  void check_voronoi(CheckResult& r) {
    std::mt19937_64 rng(opts_.seed ^ 0x0dd5eedULL);
    int probes = 0;
    int flagged = 0;
    int violations = 0;
    int max_excess = -1000;
    for (std::size_t k = 0; k < suite_.size(); ++k) {
      const Polynomial& p = suite_[k].polynomial;
      if (p.degree() > 8) continue;
      const CriticalProfile& prof = profile(k);
      double vmax = 0.0;
      for (const auto& c : prof.critical) vmax = std::max(vmax, std::abs(c.value));
      std::vector<Complex> ys;
      for (int i = 0; i < 20; ++i) {
        if (i % 2 == 0) {
          ys.push_back(p(std::polar(1.0 + 1.0 / p.degree(), 2.0 * std::numbers::pi * unit_uniform(rng))));
        } else {
          ys.push_back(std::polar(2.0 * vmax * std::sqrt(unit_uniform(rng)), 2.0 * std::numbers::pi * unit_uniform(rng)));
        }
      }
      std::vector<VoronoiCounts> counts(ys.size());
      parallel_for(ys.size(), [&](std::size_t i) { counts[i] = voronoi_multiplicity_probe(p, ys[i], prof); });
      for (const auto& vc : counts) {
        ++probes;
        if (vc.flagged) {
          ++flagged;
          continue;
        }
        for (std::size_t i = 0; i < vc.counts.size(); ++i) {
          const int excess = vc.counts[i] - (prof.critical[i].multiplicity + 1);
          max_excess = std::max(max_excess, excess);
          if (excess > 0) ++violations;
        }
      }
    }
    r.passed = violations == 0;
    r.detail = "probes=" + std::to_string(probes) + " flagged=" + std::to_string(flagged) +
               " violations=" + std::to_string(violations) + " max(count-(m+1))=" + std::to_string(max_excess);
  }

  void check_averaged_geometry(CheckResult& r) {
    int violations = 0;
    double worst_beta = -std::numeric_limits<double>::infinity();
    double worst_angle = -std::numeric_limits<double>::infinity();
    int partial = 0;
    for (std::size_t k = 0; k < suite_.size(); ++k) {
      const GeometryAverages g =
          averaged_geometry(suite_[k].polynomial, profile(k), opts_.geometry_samples, 1.0);
      partial += g.partial_probes;
      const double beta_slack = g.beta_bound + 3.0 * g.beta_plus.stderr_mean - g.beta_plus.mean;
      const double angle_slack = g.angle_bound + 3.0 * g.angle_log.stderr_mean - g.angle_log.mean;
      if (beta_slack < 0.0 || angle_slack < 0.0) ++violations;
      worst_beta = std::max(worst_beta, g.beta_plus.mean / g.beta_bound);
      worst_angle = std::max(worst_angle, g.angle_log.mean / g.angle_bound);
    }
    r.passed = violations == 0;
    r.detail = "M=" + std::to_string(opts_.geometry_samples) + " max mean(beta+)/bound=" + detail::fmt(worst_beta, 4) +
               " max mean(angle sum)/bound=" + detail::fmt(worst_angle, 4) + " partial_probes=" +
               std::to_string(partial) + " violations=" + std::to_string(violations);
  }

  void check_cost_integrals(CheckResult& r) {
    int runs = 0;
    int finite = 0;
    int integral_bad = 0;
    int estimate_bad = 0;
    for (std::size_t k = 0; k < suite_.size(); ++k) {
      const Polynomial& p = suite_[k].polynomial;
      if (p.degree() > 8) continue;
      const CriticalProfile& prof = profile(k);
      std::vector<int> bad_integral(16, 0);
      std::vector<int> bad_estimate(16, 0);
      std::vector<int> is_finite_bound(16, 0);
      std::vector<int> ran(16, 0);
      parallel_for(16, [&](std::size_t i) {
        const double t = (static_cast<double>(i) + 0.5) / 16.0;
        const RayProbe probe = ray_probe(p, t, 1.0, prof);
        const Trace trace = alphastep::run(p, probe.z0, RunConfig{});
        if (trace.outcome != Outcome::Certified) return;
        ran[i] = 1;
        const int N = trace.step_count();
        if (N > cost_integral_bound(trace, prof) + 1.0) bad_integral[i] = 1;
        if (probe.partial) return;
        const double est = costestimate_bound(trace, probe, prof);
        if (std::isfinite(est)) {
          is_finite_bound[i] = 1;
          if (N > est + 1.0) bad_estimate[i] = 1;
        }
      });
      for (int i = 0; i < 16; ++i) {
        runs += ran[i];
        finite += is_finite_bound[i];
        integral_bad += bad_integral[i];
        estimate_bad += bad_estimate[i];
      }
    }
    r.passed = runs > 0 && integral_bad == 0 && estimate_bad == 0;
    r.detail = "runs=" + std::to_string(runs) + " integral_violations=" + std::to_string(integral_bad) +
               " finite_estimates=" + std::to_string(finite) + " estimate_violations=" + std::to_string(estimate_bad);
  }

  static std::string serialize(const SweepReport& rep) {
    std::string out = sweep_csv(rep);
    for (const auto& trace : rep.traces) {
      if (trace) out += trace_jsonl(*trace);
    }
    return out;
  }

  void check_determinism(CheckResult& r) {
    auto& first = sweeps();
    int mismatches = 0;
    std::size_t bytes = 0;
    for (std::size_t k = 0; k < suite_.size(); ++k) {
      const std::string a = serialize(first[k]);
      const std::string b = serialize(run_sweep(k));
      bytes += a.size();
      if (a != b) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = "sweeps=" + std::to_string(suite_.size()) + " bytes=" + std::to_string(bytes) +
               " mismatches=" + std::to_string(mismatches);
  }

  void report_radius_ratio(CheckResult& r) {
    double fwd = 0.0;
    double rev = 0.0;
    double inv = 0.0;
    int samples = 0;
    for (const auto& per : audits()) {
      for (const auto& a : per) {
        fwd += a.radius_ratio_forward_holds * a.radius_ratio_samples;
        rev += a.radius_ratio_reversed_holds * a.radius_ratio_samples;
        inv += a.radius_ratio_inverse_holds * a.radius_ratio_samples;
        samples += a.radius_ratio_samples;
      }
    }
    const double n = std::max(1, samples);
    r.detail = "steps=" + std::to_string(samples) + " hold fractions: [1/4, 3-2sqrt2]=" + detail::fmt(fwd / n, 4) +
               " [3-2sqrt2, 1/4]=" + detail::fmt(rev / n, 4) + " [1/4, 1/(3-2sqrt2)]=" + detail::fmt(inv / n, 4);
  }

  void report_bad_angle(CheckResult& r) {
    std::string detail;
    for (double A : {std::numbers::pi / 12.0, std::numbers::pi / 4.0}) {
      double worst = 0.0;
      std::string worst_id;
      for (std::size_t k = 0; k < suite_.size(); ++k) {
        const int d = suite_[k].polynomial.degree();
        const double measure = bad_angle_measure(suite_[k].polynomial, profile(k), A, 1.0 + 1.0 / d, 4096);
        const double literal = 2.0 * A / std::numbers::pi * (d - 1.0) / d;
        if (measure / literal > worst) {
          worst = measure / literal;
          worst_id = suite_[k].id;
        }
      }
      detail += (detail.empty() ? "" : "; ") + std::string("A=") + detail::fmt(A, 4) +
                " max measure/((2A/pi)(d-1)/d)=" + detail::fmt(worst, 4) + " (" + worst_id + ")";
    }
    r.detail = detail;
  }

  void report_below_mean(CheckResult& r) {
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& e : suite_) {
      const double m = below_mean_measure(e.polynomial, 1.0 + 1.0 / e.polynomial.degree(), 4096);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    r.detail = "measure of {log|f| < d log r} at r=1+1/d ranges over [" + detail::fmt(lo, 4) + ", " +
               detail::fmt(hi, 4) + "]";
  }

  VerifyOptions opts_;
  std::vector<SuiteEntry> suite_;
  std::vector<CriticalProfile> profiles_;
  std::optional<std::vector<SweepReport>> sweeps_;
  std::optional<std::vector<std::vector<AuditReport>>> audits_;
  double sweep_seconds_ = 0.0;
};

/// "PASS  3 average-cost  ..." or "REPORT  -  radius-ratio  ..."
inline std::string format_check_line(const CheckResult& r, bool with_time) {
  std::string line = r.assertable ? (r.passed ? "PASS  " : "FAIL  ") : "REPORT";
  line += "  " + (r.criterion > 0 ? std::to_string(r.criterion) : std::string("-"));
  line += "  " + r.id + "  " + r.detail;
  if (with_time) line += "  [" + detail::fmt(r.seconds, 3) + " s]";
  return line;
}

}  // namespace alphastep
