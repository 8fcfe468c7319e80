#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twomode::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitComparisonFailed = 2;

/// Runs one subcommand. `args` excludes the program name. Writes the JSON
/// report, the CSV table and a run manifest, prints a one-line summary to
/// `out` and diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twomode::cli
