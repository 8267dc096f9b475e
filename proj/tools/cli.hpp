#pragma once

#include <ostream>
#include <span>
#include <string>

namespace tstab::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kBadInput = 2;      // invalid flags or config
inline constexpr int kIoFailure = 3;
inline constexpr int kPipelineError = 4;
inline constexpr int kInfeasible = 5;

/// Runs one command line (args[0] is the program name).
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace tstab::cli
