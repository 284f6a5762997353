#pragma once

#include <string>
#include <vector>

namespace dbi::app {

// Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O.
int run(const std::vector<std::string> &args);

} // namespace dbi::app
