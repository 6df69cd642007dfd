#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tenet::cli {

// Runs one command line (arguments after the program name).
// Exit codes: 0 success, 1 runtime error, 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tenet::cli
