#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace g3m::csv {

// Shortest round-trip decimal representation (to_chars). Deterministic,
// locale-independent; re-parsing restores the exact double.
std::string fmt(double v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

// "YYYY-MM-DDTHH:MM:SSZ" -> unix seconds. Throws on malformed input.
std::int64_t parse_iso8601_utc(std::string_view s);
std::string format_iso8601_utc(std::int64_t unix_seconds);

}  // namespace g3m::csv
