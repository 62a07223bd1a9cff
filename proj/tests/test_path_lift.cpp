#include <gtest/gtest.h>

#include <random>

#include "alphastep/path_lift.hpp"
#include "oracles.hpp"

using namespace alphastep;

namespace {

struct Replay {
  std::vector<Complex> z;
  std::vector<Complex> w;
  bool certified = false;
};

// Straight transcription of the classic loop: guide points on the ray of
// f(z0), jump (1/15)|f|/alpha, one correction toward the next guide point.
Replay replay(const std::vector<Complex>& coeffs, Complex z0, int limit) {
  Replay r;
  const Complex f0 = oracle::derivative(coeffs, z0, 0);
  const Complex dir = f0 / std::abs(f0);
  double guide = std::abs(f0);
  Complex z = z0;
  for (int n = 0; n < limit; ++n) {
    r.z.push_back(z);
    r.w.push_back(guide * dir);
    const oracle::Alpha a = oracle::alpha_gamma(coeffs, z);
    if (a.alpha <= 0.1307) {
      r.certified = true;
      return r;
    }
    const Complex f = oracle::derivative(coeffs, z, 0);
    const Complex df = oracle::derivative(coeffs, z, 1);
    double next = guide - std::abs(f) / (15.0 * a.alpha);
    if (next <= 0.0) next = 1e-3 * guide;
    z -= (f - next * dir) / df;
    guide = next;
  }
  return r;
}

const Polynomial& quarter() {
  static const Polynomial p = Polynomial::from_roots({0.5, -0.5});
  return p;
}

}  // namespace

TEST(Run, MatchesIndependentReplay) {
  std::mt19937_64 rng(21);
  for (int d : {2, 3, 5, 8}) {
    const Polynomial p = Polynomial::from_roots(oracle::random_roots(d, rng, 0.9));
    const std::vector<Complex> coeffs(p.coeffs().begin(), p.coeffs().end());
    for (double t : {0.05, 0.3, 0.61, 0.9}) {
      const Complex z0 = choose_start(d, t, 1.0);
      const Trace trace = run(p, z0, RunConfig{});
      const Replay ref = replay(coeffs, z0, 5000);
      ASSERT_EQ(trace.outcome, Outcome::Certified);
      ASSERT_TRUE(ref.certified);
      ASSERT_EQ(trace.steps.size(), ref.z.size()) << "d=" << d << " t=" << t;
      for (std::size_t n = 0; n < ref.z.size(); ++n) {
        EXPECT_LT(std::abs(trace.steps[n].z - ref.z[n]), 1e-9) << n;
        EXPECT_LT(std::abs(trace.steps[n].w - ref.w[n]), 1e-9 * std::max(1.0, std::abs(ref.w[n]))) << n;
      }
    }
  }
}

TEST(Run, GuidePointsStayOnTheRayAndDecrease) {
  std::mt19937_64 rng(22);
  const Polynomial p = Polynomial::from_roots(oracle::random_roots(6, rng));
  for (int k = 0; k < 16; ++k) {
    const Trace trace = run(p, choose_start(6, (k + 0.5) / 16, 1.0), RunConfig{});
    ASSERT_EQ(trace.outcome, Outcome::Certified);
    EXPECT_LT(std::abs(trace.steps.front().w - trace.steps.front().f_of_z), 1e-12 * std::abs(trace.steps.front().w));
    double previous = INFINITY;
    for (const auto& s : trace.steps) {
      EXPECT_LT(std::abs(std::arg(s.w / trace.direction)), 1e-12);
      EXPECT_LT(std::abs(s.w), previous);
      previous = std::abs(s.w);
      if (s.jump) {
        EXPECT_GT(*s.jump, 0.0);
      }
    }
    EXPECT_FALSE(trace.steps.back().jump.has_value());
    EXPECT_LE(trace.certificate->alpha_value, kCertifyThreshold);
    EXPECT_EQ(trace.step_count(), static_cast<int>(trace.steps.size()) - 1);
  }
}

TEST(Run, JumpFormula) {
  const Trace trace = run(quarter(), choose_start(2, 0.2, 1.0), RunConfig{});
  for (const auto& s : trace.steps) {
    if (!s.jump || s.clamped) continue;
    EXPECT_NEAR(*s.jump, std::abs(s.f_of_z) / (15.0 * s.alpha), 1e-12 * *s.jump);
  }
}

TEST(Run, LinearPolynomialCertifiesImmediately) {
  const Polynomial p = Polynomial::from_roots({0.25});
  const Trace trace = run(p, choose_start(1, 0.4, 1.0), RunConfig{});
  EXPECT_EQ(trace.outcome, Outcome::Certified);
  EXPECT_EQ(trace.step_count(), 0);
  EXPECT_EQ(pointwise_cost(p, 0.4, RunConfig{}), 0);
}

TEST(Run, QuarterHasShortRuns) {
  for (double t : {0.0, 0.125, 0.4, 0.7}) {
    const int n = pointwise_cost(quarter(), t, RunConfig{});
    EXPECT_GT(n, 0);
    EXPECT_LT(n, 40);
  }
}

TEST(Run, StepLimitCutsOff) {
  RunConfig cfg;
  cfg.max_steps = 2;
  const Trace trace = run(quarter(), choose_start(2, 0.3, 1.0), cfg);
  EXPECT_EQ(trace.outcome, Outcome::MaxStepsExceeded);
  EXPECT_EQ(trace.step_count(), 2);
  EXPECT_FALSE(trace.certificate.has_value());
  cfg.max_steps = 0;
  EXPECT_EQ(run(quarter(), choose_start(2, 0.3, 1.0), cfg).step_count(), 0);
  try {
    pointwise_cost(quarter(), 0.3, RunConfig{.max_steps = 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RunNotCertified);
  }
}

TEST(Run, DefaultStepLimit) {
  EXPECT_EQ(RunConfig{}.step_limit(), 100000);
  EXPECT_EQ(RunConfig{.max_steps = 7}.step_limit(), 7);
  // ten times 67 (13.1 + 2 |log K| / d) with K = 16, d = 2
  EXPECT_EQ(RunConfig::budget_from_conditioning(std::log(16.0), 2),
            static_cast<long>(std::ceil(670.0 * (13.1 + std::log(16.0)))));
  EXPECT_EQ(RunConfig::budget_from_conditioning(-std::log(16.0), 2),
            RunConfig::budget_from_conditioning(std::log(16.0), 2));
}

TEST(Run, SingularStarts) {
  const Polynomial p = Polynomial::from_roots({0.0, 1.0});
  // z0 = 1 is a root
  try {
    run(p, Complex{1.0, 0.0}, RunConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularStart);
  }
  // z0 = 1/2 is the critical point
  try {
    run(p, Complex{0.5, 0.0}, RunConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularStart);
  }
  EXPECT_THROW(run(p, Complex{NAN, 0.0}, RunConfig{}), Error);
}

TEST(Run, OverflowingStartIsRejected) {
  try {
    run(quarter(), choose_start(2, 0.1, 1e200), RunConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
}

TEST(Run, ChooseStart) {
  EXPECT_LT(std::abs(choose_start(4, 0.25, 2.0) - Complex{0.0, 1.5}), 1e-15);
  EXPECT_THROW(choose_start(0, 0.0, 1.0), Error);
  EXPECT_THROW(choose_start(2, 0.0, 0.0), Error);
  const Trace trace = run(quarter(), choose_start(2, 0.375, 1.0), RunConfig{});
  EXPECT_NEAR(trace.start_angle_t, 0.375, 1e-15);
  EXPECT_NEAR(trace.radius, 1.5, 1e-15);
  EXPECT_EQ(trace.poly_fingerprint, quarter().fingerprint());
}

TEST(Run, LargeJumpIsClamped) {
  RunConfig cfg;
  cfg.A = 20.0;
  cfg.max_steps = 50;
  const Trace trace = run(quarter(), choose_start(2, 0.1, 1.0), cfg);
  ASSERT_GT(trace.clamp_events, 0);
  for (std::size_t n = 0; n + 1 < trace.steps.size(); ++n) {
    const auto& s = trace.steps[n];
    EXPECT_GT(std::abs(trace.steps[n + 1].w), 0.0);
    if (s.clamped) {
      EXPECT_NEAR(std::abs(trace.steps[n + 1].w), 1e-3 * std::abs(s.w), 1e-15 * std::abs(s.w));
    }
  }
}

TEST(Run, ThresholdIsConfigurable) {
  RunConfig loose;
  loose.threshold = 10.0;
  const Trace trace = run(quarter(), choose_start(2, 0.2, 1.0), loose);
  EXPECT_EQ(trace.outcome, Outcome::Certified);
  EXPECT_LE(trace.step_count(), pointwise_cost(quarter(), 0.2, RunConfig{}));
}

TEST(Run, Deterministic) {
  std::mt19937_64 rng(23);
  const Polynomial p = Polynomial::from_roots(oracle::random_roots(8, rng));
  const Trace a = run(p, choose_start(8, 0.77, 1.0), RunConfig{});
  const Trace b = run(p, choose_start(8, 0.77, 1.0), RunConfig{});
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t n = 0; n < a.steps.size(); ++n) EXPECT_EQ(a.steps[n].z, b.steps[n].z);
}

TEST(Adaptive, AcceptedStepsMeetTheTolerance) {
  std::mt19937_64 rng(24);
  const Polynomial p = Polynomial::from_roots(oracle::random_roots(5, rng));
  RunConfig cfg;
  cfg.mode = Mode::Adaptive;
  for (double t : {0.1, 0.5, 0.8}) {
    const Trace trace = run_any(p, choose_start(5, t, 1.0), cfg);
    ASSERT_EQ(trace.outcome, Outcome::Certified);
    EXPECT_EQ(trace.mode, Mode::Adaptive);
    for (std::size_t n = 1; n < trace.steps.size(); ++n) {
      const auto& s = trace.steps[n];
      EXPECT_LE(s.delta, 0.0158 * std::abs(s.w) * (1.0 + 1e-12));
      EXPECT_LT(std::abs(std::arg(s.w / trace.direction)), 1e-12);
    }
    EXPECT_GE(trace.f_evaluations, static_cast<long>(trace.steps.size()));
  }
}

TEST(Adaptive, RoutedByMode) {
  RunConfig cfg;
  cfg.mode = Mode::Adaptive;
  EXPECT_THROW(run(quarter(), choose_start(2, 0.1, 1.0), cfg), Error);
  EXPECT_EQ(run_adaptive(quarter(), choose_start(2, 0.1, 1.0), RunConfig{}).mode, Mode::Adaptive);
}

TEST(Adaptive, UnderflowIsReported) {
  RunConfig cfg;
  cfg.mode = Mode::Adaptive;
  cfg.adaptive_accept_c = 0.0;
  const Trace trace = run_any(quarter(), choose_start(2, 0.1, 1.0), cfg);
  EXPECT_EQ(trace.outcome, Outcome::HalvingUnderflow);
  EXPECT_GT(trace.halvings, 30);
}

TEST(Constants, InductionMarginBelowOne) {
  const double m = induction_margin(1.0 / 15.0, 0.0158);
  EXPECT_NEAR(m, 0.9207, 5e-4);
  EXPECT_LT(m, 1.0);
  EXPECT_GT(induction_margin(1.0 / 10.0, 0.0158), 1.0);
}
