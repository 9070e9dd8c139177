// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "genalg/verification.hpp"

int main(int argc, char** argv) {
  genalg::verify::SuiteOptions opts;
  if (const char* w = std::getenv("GENALG_WORKERS")) opts.workers = std::max(1, std::atoi(w));
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));

  bool all_passed = true;
  for (const auto& r : genalg::verify::run(opts, ids)) {
    std::printf("%s\n", genalg::verify::format_line(r).c_str());
    std::fflush(stdout);
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 1;
}
