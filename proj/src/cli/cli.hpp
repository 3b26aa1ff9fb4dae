#pragma once

namespace otkit::cli {

enum ExitCode { kOk = 0, kInputError = 2, kNumericError = 3, kViolation = 4 };

// Parses argv, runs one subcommand and returns the process exit code.
int run(int argc, char** argv);

}  // namespace otkit::cli
