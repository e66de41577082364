#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermispin::cli {

/// Runs one CLI command. Returns the process exit status: 0 on success,
/// 2 on usage/parse errors, 3 when a resource limit is hit. Writes exactly
/// one document to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fermispin::cli
