#pragma once

namespace stpot::cli {

/**
 * Runs the batch pipeline in-process.  Returns the process exit code:
 * 0 success, 1 usage error, 2 malformed or missing data, 3 numerical failure.
 */
int run(int argc, const char* const* argv);

}  // namespace stpot::cli
