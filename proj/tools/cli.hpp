#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpsub::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedCheck = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitConfigRejected = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace lpsub::cli
