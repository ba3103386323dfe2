#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sxai {

/// Parses "YYYY-MM-DD HH:MM:SS" (UTC, fractional seconds truncated) or an
/// integer epoch. Returns nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// "2022-03-22 11:48:00" (UTC) from epoch seconds.
std::string format_timestamp(std::int64_t epoch_seconds);

}  // namespace sxai
