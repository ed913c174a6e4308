#pragma once

#include <iosfwd>

namespace osserman::cli {

// Exit codes shared by all subcommands.
enum Exit : int {
    kOk = 0,
    kNegative = 1,         // not Osserman / hypotheses violated / obstruction not certified
    kRadonBound = 2,
    kInvalidMu = 3,
    kFileError = 4,
    kObstruction = 5,
    kStageFailure = 6,
};

/// Parses argv and runs one subcommand, writing reports to `out` and
/// diagnostics to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace osserman::cli
