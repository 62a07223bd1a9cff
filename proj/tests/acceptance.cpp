// Runs every acceptance check on the built-in suite and prints one line per
// check. Exit status is nonzero if any assertable check fails.

#include <cstdio>

#include "alphastep/verification.hpp"

int main() {
  alphastep::VerifyOptions opts;
  opts.enforce_runtime = true;
  alphastep::Verifier verifier(opts);
  int failed = 0;
  for (const auto& info : alphastep::check_catalog()) {
    const auto result = verifier.run(info);
    std::printf("%s\n", alphastep::format_check_line(result, true).c_str());
    std::fflush(stdout);
    if (result.assertable && !result.passed) ++failed;
  }
  std::printf("%d check(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
