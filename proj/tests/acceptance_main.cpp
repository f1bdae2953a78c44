// Acceptance gate: one pass/fail line per criterion.
#include <cstring>
#include <iostream>

#include "spheronlab/acceptance.hpp"

int main(int argc, char** argv) {
  spheron::acceptance::RunOptions options;
  options.check_selftest_exit = true;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--cli") == 0) options.cli_path = argv[i + 1];
  if (options.cli_path.empty()) {
    std::cerr << "usage: acceptance --cli <path to spheronlab binary>\n";
    return 2;
  }
  auto results = spheron::acceptance::run_all(options);
  spheron::acceptance::print_report(std::cout, results);
  return spheron::acceptance::all_passed(results) ? 0 : 1;
}
