#ifndef CPSPECTRA_TOOLS_CLI_HPP
#define CPSPECTRA_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace cpspectra::cli {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  precondition = 2,
  malformed_json = 3,
  budget_exceeded = 4,
};

/// Runs one subcommand. `args` excludes the program name. The JSON report
/// (or error object) goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace cpspectra::cli

#endif
