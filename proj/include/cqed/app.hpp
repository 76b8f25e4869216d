#pragma once

#include <iosfwd>

namespace cqed {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalidConfig = 2,
    kExitNumericalFailure = 3,
};

/// Entry point of the `cqed` tool: simulate | poincare | lyapunov | flights |
/// sweep | figure <1-6>.  Diagnostics go to `err`, summaries to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cqed
