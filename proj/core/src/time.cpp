#include "flagtrail/time.hpp"

#include <charconv>
#include <cstdio>

#include "flagtrail/error.hpp"

namespace flagtrail {

namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(ErrorCode::InvalidArgument, "malformed timestamp '" + std::string(text) + "'");
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const auto since_midnight = t - day;
  const auto h = duration_cast<std::chrono::hours>(since_midnight);
  const auto m = duration_cast<std::chrono::minutes>(since_midnight - h);
  const auto s = duration_cast<std::chrono::seconds>(since_midnight - h - m);
  const auto ms = since_midnight - h - m - s;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(h.count()), static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(ms.count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS
  int y = 0, mo = 0, d = 0, hh = 0, mi = 0, ss = 0, frac = 0;
  if (text.size() < 20 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    bad_timestamp(text);
  }
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, ss)) {
    bad_timestamp(text);
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) frac = frac * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) bad_timestamp(text);
    for (std::size_t i = digits; i < 3; ++i) frac *= 10;
  }
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00") bad_timestamp(text);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 59) bad_timestamp(text);
  return sys_days{ymd} + std::chrono::hours{hh} + std::chrono::minutes{mi} + std::chrono::seconds{ss} +
         milliseconds{frac};
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty duration");
  long long total = 0;
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-') {
    negative = true;
    ++pos;
  }
  bool any = false;
  while (pos < text.size()) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{} || ptr == text.data() + pos) {
      throw Error(ErrorCode::InvalidArgument, "malformed duration '" + std::string(text) + "'");
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    std::string_view unit;
    const std::size_t unit_start = pos;
    while (pos < text.size() && text[pos] >= 'a' && text[pos] <= 'z') ++pos;
    unit = text.substr(unit_start, pos - unit_start);
    long long scale = 0;
    if (unit.empty() || unit == "s") scale = 1000;
    else if (unit == "ms") scale = 1;
    else if (unit == "m") scale = 60'000;
    else if (unit == "h") scale = 3'600'000;
    else if (unit == "d") scale = 86'400'000;
    else throw Error(ErrorCode::InvalidArgument, "unknown duration unit '" + std::string(unit) + "'");
    if (unit.empty() && pos != text.size()) {
      throw Error(ErrorCode::InvalidArgument, "malformed duration '" + std::string(text) + "'");
    }
    total += value * scale;
    any = true;
  }
  if (!any) throw Error(ErrorCode::InvalidArgument, "malformed duration '" + std::string(text) + "'");
  return Duration{negative ? -total : total};
}

std::string format_duration(Duration d) {
  long long ms = d.count();
  std::string out;
  if (ms < 0) {
    out = "-";
    ms = -ms;
  }
  if (ms == 0) return "0s";
  struct Unit {
    long long scale;
    const char* suffix;
  };
  static constexpr Unit units[] = {{86'400'000, "d"}, {3'600'000, "h"}, {60'000, "m"}, {1000, "s"}, {1, "ms"}};
  for (const auto& u : units) {
    if (ms >= u.scale) {
      out += std::to_string(ms / u.scale);
      out += u.suffix;
      ms %= u.scale;
    }
  }
  return out;
}

}  // namespace flagtrail
