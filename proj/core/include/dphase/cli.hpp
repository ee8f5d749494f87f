#pragma once

#include <iosfwd>

namespace dphase::cli {

// Subcommands: check | constants | props | solve-p | solve-plambda | gl |
// example41.  Exit codes: 0 success, 1 hypothesis violation (or a failed
// reproduction figure), 2 solver non-convergence, 3 config/parse error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dphase::cli
