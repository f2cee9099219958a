#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cuepoint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAnalysis = 3;

/// Runs "cuepoint <analyze|evaluate|synth> ...". args excludes the program
/// name. Diagnostics go to err, one line each.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace cuepoint::cli
