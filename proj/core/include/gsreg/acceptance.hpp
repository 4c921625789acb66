#pragma once

#include <string>
#include <vector>

namespace gsreg {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names of all acceptance suites, in run order.
std::vector<std::string> acceptance_suites();

/// Runs the named suites (empty = all); unknown names throw
/// ParameterRangeError. Each suite is deterministic.
std::vector<CheckResult> run_acceptance(const std::vector<std::string>& suites);

/// Prints one line per result ("PASS name (time) detail" / "FAIL ...") to
/// stdout and returns the number of failures.
int report_acceptance(const std::vector<CheckResult>& results);

}  // namespace gsreg
