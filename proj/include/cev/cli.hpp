#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cev::cli {

/// Runs one invocation (args[0] is the program name). Returns the exit code:
/// 0 success, 2 invalid input, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

}  // namespace cev::cli
