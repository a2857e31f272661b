#pragma once

#include <iosfwd>

namespace lpp::cli {

// Parses argv and runs the named pipeline. The machine-readable report goes
// to `out`; logs and the wall time go to `err`, keeping `out` byte-identical
// across identical runs. Exit codes: 0 success, 1 check failure, 2 input
// error, 3 resource error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lpp::cli
