#pragma once

#include <ostream>

namespace ancova_cp::cli {

/// Parses arguments and runs one subcommand. Returns the process exit status:
/// 0 on success, 2 on a usage or configuration error, 1 on any other failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ancova_cp::cli
