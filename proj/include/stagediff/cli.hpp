#pragma once

#include <iosfwd>

namespace stagediff {

/// Entry point of the `stagediff` tool. Returns 0 on success, 1 when a
/// verification tolerance is breached and 2 on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace stagediff
