#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ut::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2, numeric_error = 3 };

/// Entry point shared by the `ut` executable and tests. args excludes argv[0].
/// Diagnostics go to `err`; data only to the files named by flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace ut::cli
