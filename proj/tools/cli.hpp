#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eqd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitInput = 4;

/// Runs `eqd <args...>` (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eqd::cli
