// Runs the nine acceptance gates and prints one PASS/FAIL line per gate.
// Exit status is nonzero when any gate fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "eulerlab/acceptance.hpp"

int main(int argc, char** argv) {
  eulerlab::acceptance::Options options;
  if (argc > 1) options.seed = std::strtoul(argv[1], nullptr, 10);
  int failures = 0;
  for (const auto& r : eulerlab::acceptance::run_all(options)) {
    std::cout << eulerlab::acceptance::format_line(r) << std::endl;
    if (!r.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL")
            << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
