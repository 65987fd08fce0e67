#pragma once

#include <iosfwd>

namespace nilm::cli {

enum ExitCode : int { ok = 0, usage = 2, data = 3, training = 4 };

/// Entry point of the `nilm` tool. Verbs: stats, simulate, train, eval,
/// disaggregate, export-bundle. The data directory defaults to $NILM_DATA_DIR.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nilm::cli
