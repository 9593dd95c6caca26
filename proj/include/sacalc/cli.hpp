#pragma once

#include <ostream>

namespace sacalc {

/// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;      // tolerance or certification failure
inline constexpr int kExitBadInput = 2;    // malformed arguments or input files

/// Runs one command line (argv[0] is the program name). Reports go to `out`,
/// diagnostics to `err`; with `--json path` the report is also written as JSON.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sacalc
