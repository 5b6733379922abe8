#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace daa::cli {

// Subcommands: generate, run, sweep, verify, report. Returns the process
// exit code; usage errors print help and return nonzero.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace daa::cli
