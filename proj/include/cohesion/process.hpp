#pragma once

#include <string>
#include <vector>

namespace cohesion {

struct ProcessResult {
    int exit_code{-1};
    std::string out;  ///< captured stdout
};

/// Runs argv[0] (PATH lookup) with the given arguments, no shell involved.
/// stdout is captured; stderr is discarded. Throws std::system_error when
/// the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv);

}  // namespace cohesion
