#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wpredict {

// Runs the command-line interface on the given arguments (no program name).
// Returns the process exit code: 0 success, 2 usage or validation failure,
// 3 runtime failure (simulation abort, quadrature failure, I/O error).
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace wpredict
