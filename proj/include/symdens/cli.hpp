#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symdens {

// Runs the command line front end; `args` excludes the program name.
// Returns 0 on success, 2 on invalid input, 1 on internal failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symdens
