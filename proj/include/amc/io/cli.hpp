#pragma once

#include <ostream>

namespace amc::io {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/// Parses arguments, runs the selected subcommand and maps failures to exit
/// codes. Flags mirror config keys and override values from --config.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amc::io
