#pragma once

namespace percolade {

// Full command-line driver. Exit codes: 0 success, 1 domain failure,
// 2 usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace percolade
