#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ustat {

// Exact cardinalities of index sets. 128 bits covers n <= 1e6 at r <= 7.
using Count = unsigned __int128;

inline constexpr Count kCountMax = ~Count{0};

std::string to_string(Count value);

// Parses a non-negative decimal integer; throws DomainError on junk or overflow.
Count parse_count(std::string_view text);

// Nearest double; exact below 2^53.
inline double to_double(Count value) { return static_cast<double>(value); }

}  // namespace ustat
