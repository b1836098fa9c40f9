#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spectra::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLimit = 3;

// Runs one command. args excludes the program name. Results go to out as
// JSON (or .dl text for commands that emit knowledge bases); diagnostics
// go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectra::cli
