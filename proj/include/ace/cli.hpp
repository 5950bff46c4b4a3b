#pragma once

#include <ostream>

namespace ace::cli {

/// Entry point of the `ace` tool: train, score and info subcommands.
/// Returns 0 on success, 1 on runtime or data errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ace::cli
