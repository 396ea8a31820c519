#pragma once

#include <string>
#include <vector>

namespace ks::cli {

// Runs one subcommand (args exclude the program name). Exit codes:
//   0  success
//   1  experiment-level failure (blow-up in a sweep, barrier violation, ...)
//   2  configuration error
// Diagnostics go to stderr; data goes to files (the intervals table prints to
// stdout unless --out is given).
int dispatch(const std::vector<std::string>& args);

}  // namespace ks::cli
