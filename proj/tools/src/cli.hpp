#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

namespace probeleak::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kCapacityError = 2;
inline constexpr int kConsistencyError = 3;
inline constexpr int kInterrupted = 130;

// Runs one command line. `args` excludes the program name. `cancel`, when
// given, lets a signal handler stop a running sweep.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* cancel = nullptr);

}  // namespace probeleak::cli
