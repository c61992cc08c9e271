#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jointosc {

/// Runs one command line (args excludes the program name). Reports go to `out`,
/// diagnostics to `err`. Returns 0, 2 (config), 3 (data) or 4 (non-convergence).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jointosc
