#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace heatsig {

// Entry point behind the `heatsig` binary; also callable in-process.
// Exit codes: 0 success, 1 usage or validation failure, 2 fit completed
// but convergence diagnostics failed.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

} // namespace heatsig
