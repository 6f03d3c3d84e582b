#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace driftboost {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Parses a full token as a double. Returns false on trailing garbage or an
// empty token; non-finite values ("nan", "inf") parse successfully and are
// reported as-is, callers decide whether to accept them.
bool parse_double(std::string_view token, double& out);

bool parse_int(std::string_view token, long long& out);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

}  // namespace driftboost
