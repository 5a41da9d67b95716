#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prodstate::cli {

// Runs one command. args excludes the program name. Writes a single JSON
// document {"ok":..,"result":..,"diagnostics":[..]} to out (help text goes to
// out as plain text). Returns 0 on success, 1 on a domain error, 2 on a usage
// error.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace prodstate::cli
