#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robscatter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitConfigError = 3;

// Runs the command line front end. args excludes the program name.
// Subcommands: fit, flag, ddplot, ellipse, bench.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robscatter::cli
