#pragma once

#include <iosfwd>

namespace epca::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2 };

/// Runs one `epca` invocation. Normal output goes to `out`, diagnostics to
/// `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace epca::cli
