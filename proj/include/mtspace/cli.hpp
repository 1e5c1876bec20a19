#pragma once

#include <string>
#include <vector>

namespace mts {

/// Runs the command-line surface on the given arguments (program name
/// excluded). Returns 0 on success, 1 on domain errors (bad inputs,
/// violated preconditions), 2 on usage errors (unknown flags, missing
/// arguments).
int run_cli(const std::vector<std::string>& args);

}  // namespace mts
