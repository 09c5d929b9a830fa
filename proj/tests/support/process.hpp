#pragma once

#include <string>
#include <vector>

namespace codepoison::testing {

struct ProcessResult {
  /// Exit status, or -1 when the child did not exit normally.
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs `argv[0]` with the given arguments (no shell) and captures both streams.
ProcessResult run_process(const std::vector<std::string>& argv);

}  // namespace codepoison::testing
