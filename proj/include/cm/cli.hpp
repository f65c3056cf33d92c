#pragma once

#include <iosfwd>

namespace cm {

// Exit codes: 0 ok, 1 numerical failure, 2 input error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cm
