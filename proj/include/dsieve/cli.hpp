#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dsieve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

/// Runs one subcommand. Reports go to --out (default `out`), diagnostics
/// and the run manifest to `err` (or --manifest PATH).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Levenshtein distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Closest candidate within distance 3, or "" when nothing is close.
std::string suggest(std::string_view word, const std::vector<std::string>& candidates);

}  // namespace dsieve::cli
