#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lamof::cli {

/// Runs one subcommand. Returns 0 on success, 2 for bad input and 1 for
/// internal failures; errors are written to `err` as a JSON object
/// {code, message, context}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace lamof::cli
