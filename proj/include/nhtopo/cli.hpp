#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nhtopo {

/// Runs the command line `args` (program name excluded). Data goes to `out`
/// unless --out is given, diagnostics to `err`. Exit codes: 0 success,
/// 1 usage or parse error, 2 numerical failure, 3 not thermalizable.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nhtopo
