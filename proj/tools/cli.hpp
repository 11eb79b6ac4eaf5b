#pragma once

#include <exception>
#include <ostream>

namespace vblob::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitDegenerate = 4;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// Tables go to `out` unless --out names a directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Maps an exception from a subcommand to its exit code and reports it on err.
int exit_code_for(std::exception_ptr error, std::ostream& err);

}  // namespace vblob::cli
