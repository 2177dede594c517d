#pragma once

#include <iosfwd>

namespace asper {

/// Exit codes: 0 success, 1 input error, 2 solver cap exceeded.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace asper
