#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace desync::cli {

// Exit status: 0 success, 1 validation error, 2 runtime error.
int run_command(int argc, char** argv, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* tool_version();

}  // namespace desync::cli
