#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crnstab {

/// Runs the command-line tool. args excludes the program name.
///
/// Exit codes: 0 success; 1 negative result (classification rejected, not
/// conjugate); 2 network file parse error; 3 analysis failure or bad input;
/// 4 simulation positivity/finiteness failure; 5 verification failure;
/// 64 command-line usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crnstab
