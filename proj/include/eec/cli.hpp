#pragma once

#include <iosfwd>

namespace eec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNoConvergence = 3,
  kExitIo = 4,
};

/// Entry point for the `eec` command; writes tables to `out` (or --out) and
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eec
