#pragma once

#include <string>
#include <string_view>

namespace tabml {

// Shortest decimal string that round-trips the exact double value.
std::string formatDouble(double value);

// Strict full-string parse of a decimal double. Returns false on trailing
// garbage, empty input, or a non-finite result.
bool tryParseDouble(std::string_view text, double& out);

// FNV-1a 64-bit hash, used for config digests.
std::uint64_t fnv1a64(std::string_view text);

// Hex rendering of a 64-bit hash, zero-padded to 16 digits.
std::string toHex(std::uint64_t value);

}  // namespace tabml
