#pragma once

namespace barkley::cli {

// Full command-line front end; returns the process exit code
// (0 success, 2 validation error, 3 numerical failure).
int dispatch(int argc, const char* const* argv);

} // namespace barkley::cli
