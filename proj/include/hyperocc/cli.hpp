#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperocc::cli {

/// Exit codes: 0 ok, 2 config, 3 data, 4 numeric, 5 I/O.
enum ExitCode : int { kOk = 0, kConfig = 2, kData = 3, kNumeric = 4, kIo = 5 };

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperocc::cli
