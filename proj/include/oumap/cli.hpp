// cli.hpp — `oumap` command-line entry point
//
// Subcommands: quantize, analyze, reorder, simulate, report, sweep, synth.
// Exit status: 0 success, 1 unexpected failure or failed check,
// 2 invalid configuration, arguments or shapes, 3 file IO or format errors.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace oumap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace oumap::cli
