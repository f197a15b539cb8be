#pragma once

#include <iosfwd>

namespace henon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of henon_lab: check-f | solve-radial | solve-sector | sweep | verify | oracle-compare.
/// Results go to stdout and the output directory, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace henon
