#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace heatctl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

// Entry point of the command-line tool; args excludes the program name.
// Primary output goes to `out` (or to --out), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heatctl
