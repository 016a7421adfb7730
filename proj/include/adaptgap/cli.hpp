#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adaptgap::cli {

inline constexpr std::uint64_t kDefaultSeed = 20231107;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;

/// Entry point behind the adaptgap binary. args excludes the program name.
/// Data goes to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adaptgap::cli
