#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lftraj::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kInconsistent = 2,
  kInconclusive = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace lftraj::cli
