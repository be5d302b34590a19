#pragma once

#include <string>
#include <vector>

namespace tokaudit {

// Exit codes: 0 success, 1 validation/usage error, 2 runtime error.
int run_cli(int argc, const char* const* argv);

// Convenience for tests; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace tokaudit
