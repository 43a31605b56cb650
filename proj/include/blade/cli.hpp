#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blade {

/// Closed exit-code mapping of the command-line driver.
enum class ExitCode : int { success = 0, validation = 1, io_or_format = 2, internal = 3 };

/// Runs the `blade` command line. `args` excludes the program name.
ExitCode run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blade
