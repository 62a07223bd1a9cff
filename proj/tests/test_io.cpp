#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "alphastep/json_io.hpp"
#include "alphastep/svg.hpp"

using namespace alphastep;

namespace {

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const char* kQuarter = R"({"degree": 2, "roots": [[0.5, 0], [-0.5, 0]]})";

}  // namespace

TEST(ParsePolynomial, RootsAndCoefficients) {
  const Polynomial a = load_polynomial(kQuarter);
  const Polynomial b = load_polynomial(R"({"degree": 2, "coeffs": [[-0.25, 0], [0, 0], [1, 0]]})");
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.has_roots());
  EXPECT_FALSE(b.has_roots());
  EXPECT_EQ(load_polynomial(R"({"roots": [[0.1, 0.2]]})").degree(), 1);
}

TEST(ParsePolynomial, FromFile) {
  const std::string path = ::testing::TempDir() + "quarter.json";
  std::ofstream(path) << kQuarter;
  EXPECT_EQ(load_polynomial(path), load_polynomial(kQuarter));
  std::remove(path.c_str());
}

TEST(ParsePolynomial, Errors) {
  auto code_of = [](const std::string& text) {
    try {
      load_polynomial(text);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << text;
    return ErrorCode::RunNotCertified;
  };
  EXPECT_EQ(code_of("{not json"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"degree": 2})"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"roots": [[1, 0]], "coeffs": [[1, 0], [1, 0]]})"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"degree": 3, "roots": [[0.5, 0], [-0.5, 0]]})"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"degree": 1, "coeffs": [[1, 0], [2, 0]]})"), ErrorCode::NotMonic);
  EXPECT_EQ(code_of(R"({"roots": [[0.5, 0], [0.5, 0]]})"), ErrorCode::DuplicateRoots);
  EXPECT_EQ(code_of(R"({"roots": [0.5, 0]})"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"roots": []})"), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of("/nonexistent/poly.json"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of("[1, 2]"), ErrorCode::InvalidArgument);
}

TEST(Json, NumbersAndPairs) {
  EXPECT_TRUE(to_json_number(INFINITY).is_null());
  EXPECT_TRUE(to_json_number(NAN).is_null());
  EXPECT_EQ(to_json_pair(Complex{1.5, -2.0}).dump(), "[1.5,-2.0]");
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(format_double(INFINITY), "inf");
}

TEST(Json, PolynomialRoundTrip) {
  const Polynomial p = load_polynomial(kQuarter);
  const Json j = polynomial_to_json(p);
  EXPECT_EQ(j["degree"], 2);
  EXPECT_EQ(parse_polynomial(j), p);
}

TEST(Json, TraceLines) {
  const Polynomial p = load_polynomial(kQuarter);
  const Trace trace = run(p, choose_start(2, 0.1, 1.0), RunConfig{});
  const auto rows = lines(trace_jsonl(trace));
  ASSERT_EQ(rows.size(), trace.steps.size() + 1);
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const Json j = Json::parse(rows[n]);
    EXPECT_EQ(j["n"], n);
    for (const char* key : {"z", "w", "f"}) EXPECT_EQ(j[key].size(), 2u) << key;
    EXPECT_TRUE(j["alpha"].is_number());
    EXPECT_TRUE(j["delta"].is_number());
    const bool last = n + 1 == trace.steps.size();
    EXPECT_EQ(j["jump"].is_null(), last);
    EXPECT_EQ(j["u"].is_null(), last);
  }
  const Json summary = Json::parse(rows.back());
  EXPECT_EQ(summary["outcome"], "Certified");
  EXPECT_EQ(summary["N"], trace.step_count());
  EXPECT_EQ(summary["certified_z"].size(), 2u);
}

TEST(Json, ProfileSchema) {
  const Json j = profile_to_json(critical_profile(load_polynomial(kQuarter)));
  ASSERT_EQ(j["critical"].size(), 1u);
  EXPECT_EQ(j["critical"][0]["m"], 1);
  EXPECT_EQ(j["critical"][0]["v"][0], -0.25);
  EXPECT_EQ(j["rho"]["0"], 0.25);
  EXPECT_EQ(j["rho"]["1"], 0.25);
  EXPECT_NEAR(j["K_f"].get<double>(), 16.0, 1e-12);
  EXPECT_TRUE(j.contains("log_K_f"));
  EXPECT_TRUE(j.contains("Lambda_f"));
  const Json lin = profile_to_json(critical_profile(Polynomial::from_roots({0.2})));
  EXPECT_TRUE(lin["rho"]["0"].is_null());
  EXPECT_TRUE(lin["critical"].empty());
}

TEST(Json, SweepCsvAndJson) {
  const SweepReport rep = sweep_average_cost(load_polynomial(kQuarter), 8, RunConfig{});
  const auto rows = lines(sweep_csv(rep));
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], "t,N,outcome,beta_plus,wN_ratio");
  EXPECT_EQ(rows[1].substr(0, 7), "0.0625,");
  EXPECT_EQ(count(rows[1], ","), 4);
  const Json j = sweep_to_json(rep);
  EXPECT_EQ(j["M"], 8);
  EXPECT_EQ(j["costs"].size(), 8u);
  EXPECT_EQ(j["mean_cost"].get<double>(), rep.mean_cost);
  EXPECT_EQ(sweep_csv(rep), sweep_csv(sweep_average_cost(load_polynomial(kQuarter), 8, RunConfig{})));
}

TEST(Json, AuditSchema) {
  const Polynomial p = load_polynomial(kQuarter);
  const CriticalProfile prof = critical_profile(p);
  const AuditReport a = audit_trace(run(p, choose_start(2, 0.1, 1.0), RunConfig{}), prof);
  const Json j = audit_to_json(a);
  EXPECT_EQ(j["steps"].size(), a.steps.size());
  EXPECT_EQ(j["wN_ok"], true);
  EXPECT_EQ(j["root_index"], *a.root_index);
}

TEST(Svg, TraceHasOneMarkerPerIterate) {
  const Polynomial p = load_polynomial(kQuarter);
  const CriticalProfile prof = critical_profile(p);
  const Trace trace = run(p, choose_start(2, 0.1, 1.0), RunConfig{});
  const std::string svg = trace_svg(trace, prof);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "class=\"step\""), trace.step_count() + 1);
  EXPECT_EQ(count(svg, "class=\"root\""), 2);
  EXPECT_EQ(count(svg, "class=\"critical\""), 1);

  const Polynomial lin = Polynomial::from_roots({0.2});
  const std::string one = trace_svg(run(lin, choose_start(1, 0.0, 1.0), RunConfig{}), critical_profile(lin));
  EXPECT_EQ(count(one, "class=\"step\""), 1);
  EXPECT_EQ(count(one, "<polyline"), 0);
}

TEST(Svg, VoronoiCoversTheGrid) {
  const CriticalProfile prof = critical_profile(Polynomial::from_roots({0.0, 0.9, -0.9}));
  const int grid = 40;
  const std::string svg = voronoi_svg(prof, grid, 1.5);
  // every row is covered by run-length rectangles whose widths add up
  double width = 0.0;
  for (auto pos = svg.find("class=\"cell\""); pos != std::string::npos; pos = svg.find("class=\"cell\"", pos + 1)) {
    const auto w = svg.find("width=\"", pos) + 7;
    width += std::stod(svg.substr(w, svg.find('"', w) - w));
  }
  EXPECT_NEAR(width, grid * 600.0, 1e-6 * grid);
  EXPECT_GE(count(svg, "class=\"cell\""), grid);
  EXPECT_NE(svg.find(detail::kPalette[0]), std::string::npos);
  EXPECT_NE(svg.find(detail::kPalette[1]), std::string::npos);
}
