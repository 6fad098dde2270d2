#pragma once

namespace graspeeg {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitConfig = 5;

// Parses argv, runs one subcommand and returns its exit code. Failures print a
// single JSON line to stderr.
int run_cli(int argc, const char* const* argv);

}  // namespace graspeeg
