#pragma once

// JSON, JSONL and CSV serialization. Doubles are written in shortest
// round-trip form so repeated runs produce identical bytes; non-finite
// values become null.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphastep/critical_geometry.hpp"
#include "alphastep/error.hpp"
#include "alphastep/experiment_harness.hpp"
#include "alphastep/numeric_core.hpp"
#include "alphastep/path_lift.hpp"

namespace alphastep {

using Json = nlohmann::json;

inline Json to_json_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json_pair(Complex z) { return Json::array({to_json_number(z.real()), to_json_number(z.imag())}); }

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline Complex parse_pair(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::InvalidArgument, "expected [re, im] pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> parse_pairs(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected an array of [re, im] pairs");
  std::vector<Complex> out;
  for (const auto& item : j) out.push_back(parse_pair(item));
  return out;
}

}  // namespace detail

/// {"degree": d, "roots": [[re, im], ...]} or {"degree": d, "coeffs": [...]}
/// with ascending monic coefficients. When both are given they must agree
/// and the roots are kept.
inline Polynomial parse_polynomial(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "polynomial must be a JSON object");
  const bool has_roots = j.contains("roots");
  const bool has_coeffs = j.contains("coeffs");
  if (!has_roots && !has_coeffs) throw Error(ErrorCode::InvalidArgument, "give roots or coeffs");
  std::optional<int> degree;
  if (j.contains("degree")) {
    if (!j["degree"].is_number_integer()) throw Error(ErrorCode::InvalidArgument, "degree must be an integer");
    degree = j["degree"].get<int>();
  }
  if (has_roots) {
    auto roots = detail::parse_pairs(j["roots"]);
    if (degree && *degree != static_cast<int>(roots.size())) {
      throw Error(ErrorCode::InvalidArgument, "degree does not match the number of roots");
    }
    Polynomial p = Polynomial::from_roots(std::move(roots));
    if (has_coeffs) {
      const auto coeffs = detail::parse_pairs(j["coeffs"]);
      bool agree = coeffs.size() == p.coeffs().size();
      for (std::size_t i = 0; agree && i < coeffs.size(); ++i) {
        agree = std::abs(coeffs[i] - p.coeffs()[i]) <= 1e-12 * std::max(1.0, std::abs(p.coeffs()[i]));
      }
      if (!agree) throw Error(ErrorCode::InvalidArgument, "roots and coeffs describe different polynomials");
    }
    return p;
  }
  auto coeffs = detail::parse_pairs(j["coeffs"]);
  if (degree && *degree + 1 != static_cast<int>(coeffs.size())) {
    throw Error(ErrorCode::InvalidArgument, "degree does not match the number of coefficients");
  }
  return Polynomial::from_coeffs(std::move(coeffs));
}

/// Inline JSON if the argument starts with '{', otherwise a file path.
inline Polynomial load_polynomial(const std::string& path_or_inline) {
  std::string text;
  const auto first = path_or_inline.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && path_or_inline[first] == '{') {
    text = path_or_inline;
  } else {
    std::ifstream in(path_or_inline);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path_or_inline);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  return parse_polynomial(j);
}

inline Json polynomial_to_json(const Polynomial& p) {
  Json j;
  j["degree"] = p.degree();
  if (p.has_roots()) {
    Json roots = Json::array();
    for (const auto& r : p.roots()) roots.push_back(to_json_pair(r));
    j["roots"] = roots;
  }
  Json coeffs = Json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(to_json_pair(c));
  j["coeffs"] = coeffs;
  return j;
}

inline Json trace_step_to_json(const TraceStep& s) {
  Json j;
  j["n"] = s.n;
  j["z"] = to_json_pair(s.z);
  j["w"] = to_json_pair(s.w);
  j["f"] = to_json_pair(s.f_of_z);
  j["alpha"] = to_json_number(s.alpha);
  j["delta"] = to_json_number(s.delta);
  j["jump"] = s.jump ? to_json_number(*s.jump) : Json(nullptr);
  j["u"] = s.u ? to_json_number(*s.u) : Json(nullptr);
  if (s.clamped) j["clamped"] = true;
  return j;
}

inline Json trace_summary_to_json(const Trace& trace) {
  Json j;
  j["outcome"] = std::string(to_string(trace.outcome));
  j["N"] = trace.step_count();
  j["w_final"] = to_json_pair(trace.w_final);
  j["certified_z"] = trace.certificate ? to_json_pair(trace.certificate->point) : Json(nullptr);
  return j;
}

/// One record per step followed by the summary record.
inline std::string trace_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& s : trace.steps) out += trace_step_to_json(s).dump() + "\n";
  out += trace_summary_to_json(trace).dump() + "\n";
  return out;
}

inline Json profile_to_json(const CriticalProfile& prof) {
  Json j;
  Json crit = Json::array();
  for (const auto& c : prof.critical) {
    crit.push_back({{"c", to_json_pair(c.point)}, {"m", c.multiplicity}, {"v", to_json_pair(c.value)}});
  }
  j["critical"] = crit;
  Json roots = Json::array();
  for (const auto& r : prof.roots) roots.push_back(to_json_pair(r));
  j["roots"] = roots;
  Json rho = Json::object();
  for (std::size_t k = 0; k < prof.rho.size(); ++k) rho[std::to_string(k)] = to_json_number(prof.rho[k]);
  j["rho"] = rho;
  j["K_f"] = to_json_number(prof.K_f);
  j["log_K_f"] = to_json_number(prof.log_K_f);
  j["Lambda_f"] = to_json_number(prof.Lambda_f);
  if (prof.degenerate_near_multiple) j["degenerate_near_multiple"] = true;
  return j;
}

inline Json sweep_to_json(const SweepReport& r) {
  Json j;
  j["poly_id"] = r.poly_id;
  j["d"] = r.d;
  j["r"] = to_json_number(r.r);
  j["M"] = r.M;
  j["costs"] = r.costs;
  j["mean_cost"] = to_json_number(r.mean_cost);
  j["certified"] = r.certified;
  j["bound"] = to_json_number(r.bound);
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back({{"t", f.t}, {"outcome", f.outcome}});
  j["failures"] = failures;
  j["beta_plus_mean"] = to_json_number(r.beta_plus_mean);
  j["wN_over_rho_min"] = to_json_number(r.wN_over_rho_min);
  return j;
}

/// Columns t, N, outcome, beta_plus, wN_ratio; empty cells for missing values.
inline std::string sweep_csv(const SweepReport& r) {
  std::string out = "t,N,outcome,beta_plus,wN_ratio\n";
  for (const auto& e : r.entries) {
    out += format_double(e.t) + "," + std::to_string(e.N) + "," + e.outcome + ",";
    if (e.beta_plus) out += std::to_string(*e.beta_plus);
    out += ",";
    if (e.wN_ratio) out += format_double(*e.wN_ratio);
    out += "\n";
  }
  return out;
}

inline Json audit_to_json(const AuditReport& a) {
  Json j;
  Json steps = Json::array();
  for (const auto& s : a.steps) {
    Json js;
    js["n"] = s.n;
    js["delta_ok"] = s.delta_ok;
    js["f_vs_w_ok"] = s.f_vs_w_ok ? Json(*s.f_vs_w_ok) : Json(nullptr);
    js["w_shrink_ok"] = s.w_shrink_ok ? Json(*s.w_shrink_ok) : Json(nullptr);
    js["u_ok"] = s.u_ok ? Json(*s.u_ok) : Json(nullptr);
    js["r_n"] = to_json_number(s.r_n);
    js["R_n"] = to_json_number(s.R_n);
    js["jump_ratio"] = s.jump_ratio ? to_json_number(*s.jump_ratio) : Json(nullptr);
    js["flagged"] = s.flagged;
    steps.push_back(js);
  }
  j["steps"] = steps;
  j["delta_ok"] = a.delta_ok;
  j["f_vs_w_ok"] = a.f_vs_w_ok;
  j["w_shrink_ok"] = a.w_shrink_ok;
  j["u_ok"] = a.u_ok;
  j["jump_ratio_min"] = to_json_number(a.jump_ratio_min);
  j["jump_ok"] = a.jump_ok;
  j["flagged_steps"] = a.flagged_steps;
  j["radius_ratio_forward_holds"] = to_json_number(a.radius_ratio_forward_holds);
  j["radius_ratio_reversed_holds"] = to_json_number(a.radius_ratio_reversed_holds);
  j["radius_ratio_inverse_holds"] = to_json_number(a.radius_ratio_inverse_holds);
  j["radius_ratio_samples"] = a.radius_ratio_samples;
  j["root_index"] = a.root_index ? Json(*a.root_index) : Json(nullptr);
  j["rho"] = to_json_number(a.rho);
  j["wN_ratio"] = to_json_number(a.wN_ratio);
  j["wN_ok"] = a.wN_ok;
  return j;
}

}  // namespace alphastep
