#pragma once

// Executable acceptance gates. Each criterion is self-contained, deterministic
// and sized to finish in well under a few minutes on one core.

#include <string>
#include <vector>

namespace eulerlab::acceptance {

struct Options {
  double gamma = 1.4;      // gas used by the thermodynamic and coercivity gates
  unsigned long seed = 0;  // offsets the Sobol stream of the coercivity gate
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 9;

/// Runs one criterion (1..9); ArgumentError for other ids. Exceptions raised
/// inside a gate are caught and reported as FAIL with the message as detail.
CriterionResult run_criterion(int id, const Options& options = {});

std::vector<CriterionResult> run_all(const Options& options = {});

/// "criterion <id> <PASS|FAIL> <name>: <detail>".
std::string format_line(const CriterionResult& r);

}  // namespace eulerlab::acceptance
