#pragma once

#include <string>
#include <vector>

namespace codethresh {

struct CheckResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
};

/// Oracle-equivalence checks at desk scale: level-set counts against direct
/// enumeration, the dual bisection against both level-space oracles, the
/// badness DP against brute force, and the closed forms against the solver.
std::vector<CheckResult> run_verification_suite();

} // namespace codethresh
