#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace monocensus::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitComplete = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIncomplete = 2;
inline constexpr int kExitAbort = 3;
inline constexpr int kExitTraceFailure = 4;
inline constexpr int kExitParse = 64;
inline constexpr int kExitSeed = 65;

/// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monocensus::cli
