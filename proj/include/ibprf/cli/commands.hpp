#pragma once

#include <iosfwd>

namespace ibprf {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the `ibprf_sim` tool. Subcommands: analyze, simulate, capture,
/// figures, snapshot. Returns the process exit code; never throws.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ibprf
