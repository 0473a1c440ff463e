#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPlanningFailed = 1;
inline constexpr int kExitBadInput = 2;

/// Runs one command; `args` excludes the program name.
/// Commands: plan-grid, plan-road, plan-dynamic, gen-grid, gen-problem, gen-road.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dplan::cli
