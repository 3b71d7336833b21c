#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace codethresh::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one CLI invocation. `args` excludes the program name. Returns the exit
/// code: 0 on success, 2 on validation errors, 1 on budget or infeasibility
/// errors and on failed verification checks.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Numbers are written with 12 significant digits.
double round_significant(double value);

} // namespace codethresh::cli
