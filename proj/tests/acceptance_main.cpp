// Acceptance suite runner: one pass/fail line per criterion; exit code is
// the number of failed criteria.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "uidla/selftest.hpp"

int main(int argc, char** argv) {
  uidla::SelftestOptions opts;
  opts.out_dir = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--seed") {
      opts.seed = std::strtoull(next().c_str(), nullptr, 10);
    } else if (arg == "--out-dir") {
      opts.out_dir = next();
    } else if (arg == "--quick") {
      opts.quick = true;
    } else if (arg == "--criterion") {
      opts.only.push_back(std::atoi(next().c_str()));
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 2;
    }
  }
  std::vector<uidla::CriterionResult> results = uidla::run_selftest(opts, std::cout);
  int failures = 0;
  for (const auto& r : results) failures += r.pass ? 0 : 1;
  std::cout << (failures == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failures) +
                                    " criterion(s) failed")
            << std::endl;
  return failures;
}
