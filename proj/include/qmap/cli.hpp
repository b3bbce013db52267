#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qmap::cli {

inline constexpr const char* kSchema = "1";

enum ExitCode { Ok = 0, VerificationFailed = 1, ConfigError = 2 };

// Parses argv and runs one subcommand: classify, invariants, verify, scan-sw
// or aut-check. Reports go to --out (default: out); errors are written to err
// as one JSON object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Worker count from QMAP_THREADS, else the hardware concurrency.
int thread_count();

// Calls fn(i) for i in [0, count) on up to thread_count() threads.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace qmap::cli
