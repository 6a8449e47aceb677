#pragma once

#include <ostream>

namespace dormancy {

/// Parses argv and dispatches a subcommand. Returns the process exit code:
/// 0 success, 1 failed experiment or numerical failure, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dormancy
