#pragma once

#include <iosfwd>

namespace ndpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitIo = 4;

/// Parses argv (argv[0] is the program name), runs one subcommand and
/// returns its exit code. Diagnostics go to `err`, progress to `log`.
int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace ndpc::cli
