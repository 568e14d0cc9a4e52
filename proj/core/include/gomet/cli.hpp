#pragma once

#include <string>
#include <vector>

namespace gomet {

/// Runs one CLI invocation (argv without the program name). Returns 0 on
/// success or mathematical pass, 1 on mathematical failure (e.g. the metric
/// is not geodesic orbit, or a classification case did not reproduce), 2 on
/// usage or configuration errors. GO_METRIC_LAB_SEED overrides --seed.
int run_command(const std::vector<std::string>& argv);

}  // namespace gomet
