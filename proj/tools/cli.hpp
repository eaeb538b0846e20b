#pragma once

#include <ostream>

namespace opcalc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDefect = 1;  // a checked bound or agreement failed
inline constexpr int kUsage = 2;   // bad flags, unreadable or malformed input

/// Whole command line, argv[0] included. Reports go to out (or --out), diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opcalc::cli
