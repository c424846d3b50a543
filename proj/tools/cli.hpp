#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace caravan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailed = 2;

/// Runs one subcommand. args excludes the program name. Results go to
/// `--out` (default "-", meaning `out`); diagnostics and help go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace caravan::cli
