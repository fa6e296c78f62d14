#pragma once

#include <iosfwd>

namespace walk3lp {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

/// Runs the command line front end. Frames and reports go to `out` unless
/// --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace walk3lp
