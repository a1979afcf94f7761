#pragma once

namespace pdw {

/// Command-line front end. Exit codes: 0 success, 2 negative dynamics
/// outcome (fall before the requested step count, orbit not found), 64 usage
/// error, 65 parameter out of valid range, 73 unwritable output path.
int run_cli(int argc, const char* const* argv);

}  // namespace pdw
