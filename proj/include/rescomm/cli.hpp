#pragma once

#include <iosfwd>

namespace rescomm {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,  // bad flags, scenario or parameters
  kExitModel = 3,   // the model cannot do what was asked
  kExitIo = 4,      // files could not be read or written
};

/// Runs the `rescomm` command line. Messages go to `out`, diagnostics to
/// `err`. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rescomm
