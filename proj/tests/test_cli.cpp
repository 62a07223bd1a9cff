#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(ALPHASTEP_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + "alphastep_cli_" + name; }

const std::string kQuarter = R"('{"degree":2,"roots":[[0.5,0],[-0.5,0]]}')";
const std::string kCubic = R"('{"degree":3,"roots":[[0,0],[0.9,0],[-0.9,0]]}')";

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Cli, SolveCertifies) {
  const Result r = cli("solve --poly " + kQuarter + " --t 0.1");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("outcome: Certified"), std::string::npos);
  EXPECT_NE(r.out.find("newton_limit: [0.5, 0]"), std::string::npos) << r.out;
}

TEST(Cli, LinearSolveTakesNoSteps) {
  const Result r = cli(R"(solve --poly '{"roots":[[0.3,0]]}')");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("N: 0"), std::string::npos);
}

TEST(Cli, CertifyExitCodes) {
  EXPECT_EQ(cli("certify --poly " + kQuarter + " --z 0.5001,0").code, 0);
  // alpha(1.5) = (2/3)(1/3) exceeds the threshold
  EXPECT_EQ(cli("certify --poly " + kQuarter + " --z 1.5,0").code, 1);
  EXPECT_EQ(cli("certify --poly " + kQuarter + " --z 0,0").code, 4);
  EXPECT_EQ(cli("certify --poly " + kQuarter + " --z nonsense").code, 2);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(cli(R"(solve --poly '{"coeffs":[[1,0],[2,0]]}')").code, 2);
  EXPECT_EQ(cli("solve --poly '{broken'").code, 2);
  EXPECT_EQ(cli("solve --poly /nonexistent.json").code, 2);
  EXPECT_EQ(cli("solve --poly " + kQuarter + " --t 1.5").code, 2);
  EXPECT_EQ(cli("solve --poly " + kQuarter + " --mode sideways").code, 2);
  EXPECT_EQ(cli("solve --poly " + kQuarter + " --format csv").code, 2);
  EXPECT_EQ(cli("sweep --poly " + kQuarter + " --M 0").code, 2);
  EXPECT_EQ(cli("verify --only no-such-check").code, 2);
  EXPECT_EQ(cli("plot --poly " + kQuarter + " --kind pie").code, 2);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("sweep --poly " + kQuarter + " --C 1e200 --M 1").code, 2);
}

TEST(Cli, CutoffExitCode) {
  const Result r = cli("solve --poly " + kQuarter + " --t 0.1 --max-steps 1");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("MaxStepsExceeded"), std::string::npos);
}

TEST(Cli, SingularStartExitCode) {
  // z0 = 1.5 is a root
  EXPECT_EQ(cli(R"(solve --poly '{"roots":[[1.5,0],[-0.5,0]]}' --t 0)").code, 4);
}

TEST(Cli, SweepWithinAndBeyondBound) {
  const Result ok = cli("sweep --poly " + kQuarter + " --M 16");
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("certified: 16/16"), std::string::npos);
  // a far-away start circle makes every run long
  EXPECT_EQ(cli("sweep --poly " + kQuarter + " --C 1e100 --M 4").code, 5);
}

TEST(Cli, VerifyExitCodes) {
  const Result ok = cli("verify --only constants,log-integral");
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(count(ok.out, "PASS"), 2);
  // no suite polynomial has degree 1, so there are no traces to check
  EXPECT_EQ(cli("verify --d-max 1 --only step-invariants").code, 6);
}

TEST(Cli, ProfileJson) {
  const Result r = cli("profile --poly " + kCubic);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["critical"].size(), 2u);
  EXPECT_NEAR(j["K_f"].get<double>(), 45.27, 0.01);
}

TEST(Cli, SweepCsvIsReproducible) {
  const std::string a = tmp("a.csv");
  const std::string b = tmp("b.csv");
  ASSERT_EQ(cli("sweep --poly " + kCubic + " --M 32 --format csv --out " + a).code, 0);
  ASSERT_EQ(cli("sweep --poly " + kCubic + " --M 32 --format csv --out " + b).code, 0);
  const std::string text = slurp(a);
  EXPECT_EQ(text.rfind("t,N,outcome,beta_plus,wN_ratio\n", 0), 0u);
  EXPECT_EQ(count(text, "\n"), 33);
  EXPECT_EQ(text, slurp(b));
  const std::string j = tmp("s.json");
  ASSERT_EQ(cli("sweep --poly " + kCubic + " --M 8 --format json --out " + j).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(j))["M"], 8);
}

TEST(Cli, SeededSweepIsReproducible) {
  const std::string a = tmp("seed_a.csv");
  const std::string b = tmp("seed_b.csv");
  ASSERT_EQ(cli("sweep --poly " + kCubic + " --M 8 --seed 5 --out " + a).code, 0);
  ASSERT_EQ(cli("sweep --poly " + kCubic + " --M 8 --seed 5 --out " + b).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, SolveTraceIsReproducible) {
  const std::string a = tmp("a.jsonl");
  const std::string b = tmp("b.jsonl");
  ASSERT_EQ(cli("solve --poly " + kCubic + " --t 0.3 --out " + a).code, 0);
  ASSERT_EQ(cli("solve --poly " + kCubic + " --t 0.3 --format jsonl --out " + b).code, 0);
  const std::string text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  std::istringstream in(text);
  std::string line;
  std::string last;
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(nlohmann::json::parse(last)["outcome"], "Certified");
}

TEST(Cli, AdaptiveMode) {
  const Result r = cli("solve --poly " + kCubic + " --t 0.3 --mode adaptive");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Certified"), std::string::npos);
}

TEST(Cli, PlotTrace) {
  const std::string path = tmp("trace.svg");
  ASSERT_EQ(cli("plot --poly " + kQuarter + " --t 0.1 --kind trace --out " + path).code, 0);
  const Result solved = cli("solve --poly " + kQuarter + " --t 0.1");
  const auto pos = solved.out.find("N: ") + 3;
  const int n = std::stoi(solved.out.substr(pos));
  EXPECT_EQ(count(slurp(path), "class=\"step\""), n + 1);
}

TEST(Cli, PlotVoronoi) {
  const std::string path = tmp("voronoi.svg");
  ASSERT_EQ(cli("plot --poly " + kQuarter + " --kind voronoi --grid 30 --out " + path).code, 0);
  const std::string svg = slurp(path);
  EXPECT_GE(count(svg, "class=\"cell\""), 30);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
