// Command-line front end: solve, certify, profile, sweep, verify, plot.
//
// Exit codes: 0 ok, 1 point not certified (certify only), 2 bad input,
// 3 step cutoff, 4 singular start or critical point hit, 5 average cost
// above the bound, 6 verification failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphastep/alpha_theory.hpp"
#include "alphastep/critical_geometry.hpp"
#include "alphastep/experiment_harness.hpp"
#include "alphastep/json_io.hpp"
#include "alphastep/path_lift.hpp"
#include "alphastep/svg.hpp"
#include "alphastep/verification.hpp"

namespace {

using namespace alphastep;

enum Exit : int {
  kOk = 0,
  kNotCertified = 1,
  kInput = 2,
  kCutoff = 3,
  kSingular = 4,
  kBoundViolated = 5,
  kVerifyFailed = 6,
};

struct Options {
  std::string poly;
  double t = 0.0;
  double C = 1.0;
  int M = 64;
  std::string mode = "classic";
  std::optional<double> threshold;
  std::optional<long> max_steps;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> only;
  int d_max = 16;
  std::string z;
  std::string kind = "trace";
  int grid = 200;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  cfg.C = o.C;
  if (o.threshold) cfg.threshold = *o.threshold;
  cfg.max_steps = o.max_steps;
  if (o.mode == "adaptive") cfg.mode = Mode::Adaptive;
  else if (o.mode != "classic") throw InputError("--mode must be classic or adaptive");
  if (!(o.C > 0.0)) throw InputError("--C must be positive");
  if (o.max_steps && *o.max_steps < 0) throw InputError("--max-steps must be >= 0");
  return cfg;
}

void check_format(const Options& o, std::initializer_list<const char*> allowed) {
  if (o.format.empty()) return;
  for (const char* a : allowed) {
    if (o.format == a) return;
  }
  throw InputError("unsupported --format " + o.format + " for this command");
}

void write_output(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + o.out);
  f << text;
}

Complex parse_point(const std::string& s) {
  std::stringstream ss(s);
  double re = 0.0;
  double im = 0.0;
  char comma = 0;
  if (!(ss >> re >> comma >> im) || comma != ',') throw InputError("--z must look like re,im");
  return {re, im};
}

std::string pair_text(Complex z) { return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]"; }

int cmd_solve(const Options& o) {
  check_format(o, {"jsonl"});
  const Polynomial p = load_polynomial(o.poly);
  const RunConfig cfg = run_config(o);
  Trace trace;
  try {
    trace = run_any(p, choose_start(p.degree(), o.t, o.C), cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularStart) throw;
    std::cout << "outcome: SingularStart (" << e.what() << ")\n";
    return kSingular;
  }
  std::cout << "outcome: " << to_string(trace.outcome) << "\n";
  std::cout << "N: " << trace.step_count() << "\n";
  if (trace.certificate) {
    std::cout << "z: " << pair_text(trace.certificate->point) << "\n";
    std::cout << "alpha: " << format_double(trace.certificate->alpha_value) << "\n";
    Complex z = trace.certificate->point;
    try {
      for (int k = 0; k < 6; ++k) z = newton_step(p, z);
      std::cout << "newton_limit: " << pair_text(z) << "\n";
    } catch (const Error&) {
      std::cout << "newton_limit: null\n";
    }
  }
  if (!o.out.empty()) write_output(o, trace_jsonl(trace));
  switch (trace.outcome) {
    case Outcome::Certified: return kOk;
    case Outcome::MaxStepsExceeded:
    case Outcome::HalvingUnderflow: return kCutoff;
    case Outcome::CriticalPointEncountered: return kSingular;
  }
  return kOk;
}

int cmd_certify(const Options& o) {
  const Polynomial p = load_polynomial(o.poly);
  const Complex z = o.z.empty() ? choose_start(p.degree(), o.t, o.C) : parse_point(o.z);
  const double threshold = o.threshold.value_or(kCertifyThreshold);
  AlphaData a;
  try {
    a = alpha_gamma(p, z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CriticalPointInput) throw;
    std::cout << "z: " << pair_text(z) << "\ncritical point: f'(z) = 0\n";
    return kSingular;
  }
  const bool ok = a.alpha <= threshold;
  std::cout << "z: " << pair_text(z) << "\n";
  std::cout << "alpha: " << format_double(a.alpha) << "\n";
  std::cout << "gamma: " << format_double(a.gamma) << "\n";
  std::cout << "certified: " << (ok ? "yes" : "no") << "\n";
  return ok ? kOk : kNotCertified;
}

int cmd_profile(const Options& o) {
  check_format(o, {"json"});
  const Polynomial p = load_polynomial(o.poly);
  write_output(o, profile_to_json(critical_profile(p)).dump(2) + "\n");
  return kOk;
}

int cmd_sweep(const Options& o) {
  check_format(o, {"csv", "json"});
  if (o.M < 1) throw InputError("--M must be >= 1");
  const Polynomial p = load_polynomial(o.poly);
  const RunConfig cfg = run_config(o);
  SweepOptions so;
  so.poly_id = "input";
  so.seed = o.seed;
  const SweepReport rep = sweep_average_cost(p, o.M, cfg, so);
  if (!o.out.empty()) write_output(o, o.format == "json" ? sweep_to_json(rep).dump(2) + "\n" : sweep_csv(rep));
  std::cout << "mean_cost: " << format_double(rep.mean_cost) << "\n";
  std::cout << "bound: " << format_double(rep.bound) << "\n";
  std::cout << "certified: " << rep.certified << "/" << rep.M << "\n";
  std::cout << "beta_plus_mean: " << format_double(rep.beta_plus_mean) << "\n";
  return rep.within_bound() ? kOk : kBoundViolated;
}

int cmd_verify(const Options& o) {
  VerifyOptions vo;
  vo.d_max = o.d_max;
  if (o.seed) vo.seed = *o.seed;
  for (const auto& id : o.only) {
    if (!is_known_check(id)) throw InputError("unknown check " + id);
    vo.only.insert(id);
  }
  Verifier verifier(vo);
  bool ok = true;
  for (const auto& r : verifier.run_all()) {
    std::cout << format_check_line(r, false) << "\n" << std::flush;
    if (r.assertable && !r.passed) ok = false;
  }
  return ok ? kOk : kVerifyFailed;
}

int cmd_plot(const Options& o) {
  check_format(o, {"svg"});
  const Polynomial p = load_polynomial(o.poly);
  const CriticalProfile prof = critical_profile(p);
  if (o.kind == "trace") {
    const Trace trace = run_any(p, choose_start(p.degree(), o.t, o.C), run_config(o));
    write_output(o, trace_svg(trace, prof));
  } else if (o.kind == "voronoi") {
    if (o.grid < 1) throw InputError("--grid must be >= 1");
    write_output(o, voronoi_svg(prof, o.grid, 1.1 * (1.0 + o.C / p.degree())));
  } else {
    throw InputError("--kind must be trace or voronoi");
  }
  return kOk;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SingularStart:
    case ErrorCode::CriticalPointInput:
    case ErrorCode::CriticalPointEncountered: return kSingular;
    case ErrorCode::EmptyInput:
    case ErrorCode::DuplicateRoots:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::NotMonic:
    case ErrorCode::InvalidArgument:
    case ErrorCode::RootsUnknown:
    case ErrorCode::ProfileMismatch: return kInput;
    default: return kVerifyFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-step path lifting: certified approximate zeros of complex polynomials"};
  app.require_subcommand(1);
  Options o;

  auto poly_opt = [&](CLI::App* sub) {
    sub->add_option("--poly", o.poly, "polynomial JSON file or inline JSON")->required();
  };
  auto run_opts = [&](CLI::App* sub) {
    sub->add_option("--t", o.t, "start angle t in [0, 1)")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--C", o.C, "start radius is 1 + C/d");
    sub->add_option("--mode", o.mode, "classic or adaptive");
    sub->add_option("--threshold", o.threshold, "alpha threshold for stopping");
    sub->add_option("--max-steps", o.max_steps, "step budget");
  };
  auto out_opts = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file");
    sub->add_option("--format", o.format, "json, jsonl, csv or svg");
  };

  auto* solve = app.add_subcommand("solve", "run the algorithm from one start point");
  poly_opt(solve);
  run_opts(solve);
  out_opts(solve);

  auto* certify_cmd = app.add_subcommand("certify", "check alpha(z) against the threshold");
  poly_opt(certify_cmd);
  certify_cmd->add_option("--z", o.z, "point as re,im (default: the start point for --t)");
  certify_cmd->add_option("--t", o.t, "start angle t in [0, 1)")->check(CLI::Range(0.0, 1.0));
  certify_cmd->add_option("--C", o.C, "start radius is 1 + C/d");
  certify_cmd->add_option("--threshold", o.threshold, "alpha threshold");

  auto* profile = app.add_subcommand("profile", "critical points, rho per root, K_f and Lambda_f");
  poly_opt(profile);
  out_opts(profile);

  auto* sweep = app.add_subcommand("sweep", "average cost over M start points");
  poly_opt(sweep);
  run_opts(sweep);
  out_opts(sweep);
  sweep->add_option("--M", o.M, "number of start points");
  sweep->add_option("--seed", o.seed, "random start angles from this seed");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--only", o.only, "run only these checks")->delimiter(',');
  verify->add_option("--d-max", o.d_max, "skip suite polynomials of higher degree");
  verify->add_option("--seed", o.seed, "seed of the random suite polynomials");

  auto* plot = app.add_subcommand("plot", "SVG of a trace or of the Voronoi cells");
  poly_opt(plot);
  run_opts(plot);
  out_opts(plot);
  plot->add_option("--kind", o.kind, "trace or voronoi");
  plot->add_option("--grid", o.grid, "grid cells per side for voronoi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  if (o.t >= 1.0) {
    std::cerr << "error: --t must lie in [0, 1)\n";
    return kInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (certify_cmd->parsed()) return cmd_certify(o);
    if (profile->parsed()) return cmd_profile(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (verify->parsed()) return cmd_verify(o);
    if (plot->parsed()) return cmd_plot(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  }
  return kInput;
}
