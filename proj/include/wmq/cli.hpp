#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wmq {

/// Parses and executes one command line (program name excluded). Reports go
/// to `out`, diagnostics to `err`. Exit codes: 0 success, 1 verification or
/// assertion failure, 2 usage error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace wmq
