#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace methlib {

/// Exit codes: 0 success, 1 usage or request error, 2 data or validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace methlib
