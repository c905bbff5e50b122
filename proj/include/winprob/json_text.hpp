#pragma once

#include <json.hpp>

#include <string>

namespace winprob {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal in fixed notation ("0.00001", never "1e-05").
// Non-finite values become "null".
std::string plain_decimal(double v);

// Like Json::dump but every floating-point number goes through plain_decimal.
std::string dump_plain(const Json& j, int indent = 2);

} // namespace winprob
