#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace hymem::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kInputUnreadable = 2;
inline constexpr int kEmptyStore = 3;

// Entry point behind main(); takes argv-style arguments (without the program
// name) so tests can drive the CLI in-process.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace hymem::cli
