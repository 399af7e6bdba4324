#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coh::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kTypeError = 1;
inline constexpr int kIncoherent = 2;
inline constexpr int kInconclusive = 3;
inline constexpr int kParseError = 4;

/// Runs one command. args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coh::cli
