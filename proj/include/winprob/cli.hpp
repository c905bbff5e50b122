#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace winprob::cli {

// Version of the JSON documents written by --format json.
inline constexpr int kJsonSchemaVersion = 1;

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumeric = 2;
inline constexpr int kGoldenFailure = 3;

// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace winprob::cli
