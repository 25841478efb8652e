#pragma once

#include <iosfwd>

namespace nkg::cli {

/// Exit codes: 0 success, 1 domain/data errors, 2 usage errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `nkg` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nkg::cli
