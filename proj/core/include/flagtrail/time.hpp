#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace flagtrail {

/// Millisecond-precision UTC instant. All event times use this clock.
using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string format_timestamp(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z` (or `+00:00`). Throws Error(InvalidArgument).
Timestamp parse_timestamp(std::string_view text);

/// Compact duration syntax: a sequence of `<int><unit>` with unit in
/// {ms, s, m, h, d}, e.g. `30m`, `1m15s`, `250ms`. A bare integer is seconds.
Duration parse_duration(std::string_view text);

/// Inverse of parse_duration, canonical form (`1m15s`, `0s`, `1d2h`).
std::string format_duration(Duration d);

inline double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

constexpr Duration seconds(long long s) { return std::chrono::duration_cast<Duration>(std::chrono::seconds(s)); }
constexpr Duration minutes(long long m) { return std::chrono::duration_cast<Duration>(std::chrono::minutes(m)); }
constexpr Duration hours(long long h) { return std::chrono::duration_cast<Duration>(std::chrono::hours(h)); }

}  // namespace flagtrail
