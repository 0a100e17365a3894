#pragma once

#include <iosfwd>

namespace lingrowth::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDomainViolation = 2,
  kNonConvergence = 3,
};

// Parses argv and runs one subcommand. Summaries go to `out`, diagnostics to
// `err`; the return value is one of ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lingrowth::cli
