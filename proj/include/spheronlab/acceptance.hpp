#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spheron::acceptance {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  double seconds = 0;
  std::string detail;
};

struct RunOptions {
  // Path to the command-line binary, exercised by the determinism
  // criterion.  Empty disables the criteria that need a subprocess.
  std::string cli_path;
  // Also require `<cli> selftest` to exit 0 inside the determinism
  // criterion.  Must be false when run_all is itself called from selftest.
  bool check_selftest_exit = false;
  // Name of a criterion whose measured defect is artificially inflated, to
  // demonstrate that a failing criterion is detected and named.
  std::string sabotage;
};

std::vector<CriterionResult> run_all(const RunOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

// One line per criterion: PASS/FAIL, index, name, runtime, detail.
void print_report(std::ostream& out,
                  const std::vector<CriterionResult>& results);

}  // namespace spheron::acceptance
