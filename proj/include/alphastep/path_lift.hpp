#pragma once

// The alpha-step path-lifting algorithm. Guide points w_n walk down the ray
// of w_0 = f(z_0) toward 0 with jumps (1/15)|f(z_n)|/alpha(z_n); each z_{n+1}
// is one Newton-type correction of z_n toward the new guide point. The
// adaptive variant picks the guide point by step halving instead of alpha.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "alphastep/alpha_theory.hpp"
#include "alphastep/numeric_core.hpp"

namespace alphastep {

enum class Outcome {
  Certified,
  MaxStepsExceeded,
  CriticalPointEncountered,
  HalvingUnderflow,
};

constexpr std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Certified: return "Certified";
    case Outcome::MaxStepsExceeded: return "MaxStepsExceeded";
    case Outcome::CriticalPointEncountered: return "CriticalPointEncountered";
    case Outcome::HalvingUnderflow: return "HalvingUnderflow";
  }
  return "Unknown";
}

enum class Mode { Classic, Adaptive };

struct TraceStep {
  int n = 0;
  Complex z;
  Complex w;
  Complex f_of_z;
  double alpha = 0.0;
  /// |f(z_n) - w_n|
  double delta = 0.0;
  /// |w_n - w_{n+1}|; absent on the final step.
  std::optional<double> jump;
  /// -(z_{n+1} - z_n) f'(z_n) / f(z_n); absent on the final step.
  std::optional<Complex> h;
  /// alpha_n |h_n|; absent on the final step.
  std::optional<double> u;
  /// The guide point would have crossed 0 and was clamped.
  bool clamped = false;
};

struct Trace {
  std::vector<TraceStep> steps;
  double start_angle_t = 0.0;
  double radius = 0.0;
  Outcome outcome = Outcome::MaxStepsExceeded;
  std::optional<Certificate> certificate;
  Complex w_final;
  Mode mode = Mode::Classic;
  /// Unit direction of the ray of w_0.
  Complex direction{1.0, 0.0};
  std::uint64_t poly_fingerprint = 0;
  /// Evaluations of f beyond the ones at accepted iterates (adaptive mode).
  long f_evaluations = 0;
  long halvings = 0;
  int clamp_events = 0;

  /// Number of guide-point updates.
  int step_count() const {
    int count = 0;
    for (const auto& s : steps) count += s.jump.has_value() ? 1 : 0;
    return count;
  }
};

struct RunConfig {
  /// Start circle radius is 1 + C/d.
  double C = 1.0;
  /// Jump coefficient.
  double A = 1.0 / 15.0;
  double threshold = kCertifyThreshold;
  /// Unset means 100000, or the conditioning budget where K_f is known.
  std::optional<long> max_steps;
  Mode mode = Mode::Classic;
  double adaptive_h0 = 1.0 / 15.0;
  double adaptive_accept_c = 0.0158;

  /// Step budget of ten times the average-cost bound 67 (13.1 + 2|log K_f|/d).
  static long budget_from_conditioning(double log_K_f, int degree) {
    const double bound = 67.0 * (13.1 + 2.0 * std::abs(log_K_f) / degree);
    return static_cast<long>(std::ceil(10.0 * bound));
  }

  long step_limit() const { return max_steps.value_or(100000); }
};

/// (1 + C/d) e^{2 pi i t}
inline Complex choose_start(int degree, double t, double C) {
  if (degree < 1) throw Error(ErrorCode::InvalidArgument, "degree must be >= 1");
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
  return std::polar(1.0 + C / degree, 2.0 * std::numbers::pi * t);
}

namespace detail {

inline void check_start(const Polynomial& p, Complex z0, Complex f0, Complex d0) {
  require_finite(z0, "start point is not finite");
  if (!std::isfinite(std::abs(f0)) || !std::isfinite(std::abs(d0))) {
    throw Error(ErrorCode::NonFiniteInput, "f or f' overflows at the start point");
  }
  if (f0 == Complex{0.0, 0.0}) throw Error(ErrorCode::SingularStart, "f(z0) = 0");
  if (!(std::abs(d0) >= kCriticalGuard)) throw Error(ErrorCode::SingularStart, "f'(z0) = 0");
  (void)p;
}

inline Trace start_trace(const Polynomial& p, Complex z0, const RunConfig& cfg, Complex f0) {
  Trace trace;
  trace.mode = cfg.mode;
  trace.radius = std::abs(z0);
  double t = std::arg(z0) / (2.0 * std::numbers::pi);
  if (t < 0.0) t += 1.0;
  if (t >= 1.0) t = 0.0;
  trace.start_angle_t = t;
  trace.direction = f0 / std::abs(f0);
  trace.poly_fingerprint = p.fingerprint();
  return trace;
}

}  // namespace detail

/// Classic alpha-step run from z0.
inline Trace run(const Polynomial& p, Complex z0, const RunConfig& cfg) {
  if (cfg.mode == Mode::Adaptive) throw Error(ErrorCode::InvalidArgument, "use run_adaptive");
  const auto [f0, d0] = p.value_and_derivative(z0);
  detail::check_start(p, z0, f0, d0);
  Trace trace = detail::start_trace(p, z0, cfg, f0);

  // The guide point is tracked by its distance from 0 along the fixed unit
  // direction, so every w_n lies on the ray of w_0.
  double guide = std::abs(f0);
  Complex z = z0;
  for (long n = 0;; ++n) {
    const Complex w = guide * trace.direction;
    if (n >= cfg.step_limit()) {
      trace.outcome = Outcome::MaxStepsExceeded;
      trace.w_final = w;
      return trace;
    }
    const auto taylor = taylor_coefficients(p.coeffs(), z, p.degree());
    const Complex fz = taylor[0];
    const Complex dfz = taylor[1];
    if (!is_finite(z) || !(std::abs(dfz) >= kCriticalGuard)) {
      trace.outcome = Outcome::CriticalPointEncountered;
      trace.w_final = w;
      return trace;
    }
    const AlphaData a = alpha_from_taylor(taylor);

    TraceStep step;
    step.n = static_cast<int>(n);
    step.z = z;
    step.w = w;
    step.f_of_z = fz;
    step.alpha = a.alpha;
    step.delta = std::abs(fz - w);

    if (a.alpha <= cfg.threshold) {
      trace.steps.push_back(step);
      trace.outcome = Outcome::Certified;
      trace.certificate = Certificate{z, a.alpha, cfg.threshold, std::nullopt};
      trace.w_final = w;
      return trace;
    }

    const double jump = cfg.A * std::abs(fz) / a.alpha;
    double next_guide = guide - jump;
    if (!(next_guide > 0.0)) {
      next_guide = 1e-3 * guide;
      step.clamped = true;
      ++trace.clamp_events;
    }
    const Complex w_next = next_guide * trace.direction;
    const Complex z_next = z - (fz - w_next) / dfz;

    step.jump = guide - next_guide;
    step.h = -(z_next - z) * dfz / fz;
    step.u = a.alpha * std::abs(*step.h);
    trace.steps.push_back(step);

    guide = next_guide;
    z = z_next;
  }
}

/// Adaptive variant: w_{n+1} = (1 - h) |f(z_n)| w with h halved until
/// |f(z_{n+1}) - w_{n+1}| <= c |w_{n+1}|; alpha is used only to stop.
inline Trace run_adaptive(const Polynomial& p, Complex z0, const RunConfig& cfg) {
  const auto [f0, d0] = p.value_and_derivative(z0);
  detail::check_start(p, z0, f0, d0);
  RunConfig local = cfg;
  local.mode = Mode::Adaptive;
  Trace trace = detail::start_trace(p, z0, local, f0);

  Complex z = z0;
  Complex w = f0;
  double h_try = cfg.adaptive_h0;
  for (long n = 0;; ++n) {
    if (n >= cfg.step_limit()) {
      trace.outcome = Outcome::MaxStepsExceeded;
      trace.w_final = w;
      return trace;
    }
    const auto taylor = taylor_coefficients(p.coeffs(), z, p.degree());
    const Complex fz = taylor[0];
    const Complex dfz = taylor[1];
    ++trace.f_evaluations;
    if (!is_finite(z) || !(std::abs(dfz) >= kCriticalGuard)) {
      trace.outcome = Outcome::CriticalPointEncountered;
      trace.w_final = w;
      return trace;
    }
    const AlphaData a = alpha_from_taylor(taylor);

    TraceStep step;
    step.n = static_cast<int>(n);
    step.z = z;
    step.w = w;
    step.f_of_z = fz;
    step.alpha = a.alpha;
    step.delta = std::abs(fz - w);

    if (a.alpha <= cfg.threshold) {
      trace.steps.push_back(step);
      trace.outcome = Outcome::Certified;
      trace.certificate = Certificate{z, a.alpha, cfg.threshold, std::nullopt};
      trace.w_final = w;
      return trace;
    }

    double h = h_try;
    Complex w_next;
    Complex z_next;
    for (;;) {
      w_next = (1.0 - h) * std::abs(fz) * trace.direction;
      z_next = z - (fz - w_next) / dfz;
      const Complex f_next = p(z_next);
      ++trace.f_evaluations;
      if (is_finite(f_next) && std::abs(f_next - w_next) <= cfg.adaptive_accept_c * std::abs(w_next)) break;
      h *= 0.5;
      ++trace.halvings;
      if (h < 1e-12) {
        trace.steps.push_back(step);
        trace.outcome = Outcome::HalvingUnderflow;
        trace.w_final = w;
        return trace;
      }
    }
    h_try = std::min(cfg.adaptive_h0, 2.0 * h);

    step.jump = std::abs(w - w_next);
    step.h = -(z_next - z) * dfz / fz;
    step.u = a.alpha * std::abs(*step.h);
    trace.steps.push_back(step);

    w = w_next;
    z = z_next;
  }
}

/// Dispatches on cfg.mode.
inline Trace run_any(const Polynomial& p, Complex z0, const RunConfig& cfg) {
  return cfg.mode == Mode::Adaptive ? run_adaptive(p, z0, cfg) : run(p, z0, cfg);
}

/// Number of guide-point updates.for the start (1 + C/d) e^{2 pi i t}. Throws
/// RunNotCertified when the run ends any other way.
inline int pointwise_cost(const Polynomial& p, double t, const RunConfig& cfg) {
  const Trace trace = run_any(p, choose_start(p.degree(), t, cfg.C), cfg);
  if (trace.outcome != Outcome::Certified) {
    throw Error(ErrorCode::RunNotCertified, std::string(to_string(trace.outcome)));
  }
  return trace.step_count();
}

/// Left side of the induction inequality (A+c)^2 / psi(A+c)^2 / c with
/// psi(u) = 1 - 4u + 2u^2; the step constants are admissible when it is < 1.
inline double induction_margin(double A, double c) {
  const double u = A + c;
  const double psi = 1.0 - 4.0 * u + 2.0 * u * u;
  return u * u / (psi * psi) / c;
}

}  // namespace alphastep
