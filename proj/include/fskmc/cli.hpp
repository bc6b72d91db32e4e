#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fskmc {

/// Entry point of the `fskmc` tool. Returns 0 on success, 2 on a config or
/// usage error, 1 on a runtime error. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace fskmc
