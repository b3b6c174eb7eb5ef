#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uidla {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  uint64_t seed = 42;
  std::string out_dir = "selftest_out";
  // Reduced sample sizes for development runs; never used for acceptance.
  bool quick = false;
  // Empty: run everything. Otherwise the listed criterion ids.
  std::vector<int> only;
};

/// Runs the acceptance criteria, printing one pass/fail line per criterion
/// to `log`, and writes each criterion's CSV artifacts under
/// out_dir/run1. Criterion 11 re-executes criteria 1-10 with the same seed
/// into out_dir/run2 and demands hash-identical outputs.
std::vector<CriterionResult> run_selftest(const SelftestOptions& opts,
                                          std::ostream& log);

}  // namespace uidla
