#pragma once

#include <cstddef>
#include <exception>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sqlbridge {

/// Stable across subcommands.
enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitInvalid = 2,
    kExitExecution = 3,
};

int exit_code_for(const std::exception& error);

/// 1-based line and column of a byte offset.
struct LineColumn {
    std::size_t line = 1;
    std::size_t column = 1;
};
LineColumn line_column(std::string_view text, std::size_t offset);

/// Entry point of the `sqlbridge` tool: parse | compile | run | exec-step.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqlbridge
