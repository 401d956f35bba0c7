#pragma once

#include <iosfwd>

namespace lsamarl::experiment {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Verbs: train, evaluate, ablate-n, ablate-features, report. Results go to
/// `out`, progress and warnings to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lsamarl::experiment
