#pragma once

#include <iosfwd>

namespace rgd {

/// Entry point of the `rgd` tool. Returns 0 on success, 1 on invalid input
/// and 2 when a solver stopped at its iteration cap (outputs still written).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rgd
