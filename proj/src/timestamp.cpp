#include "floodscout/timestamp.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "floodscout/error.hpp"

namespace floodscout {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view text) {
  int v = 0;
  if (pos + n > s.size()) {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is truncated", text));
  }
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, v);
  if (ec != std::errc{} || ptr != s.data() + pos + n) {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is malformed", text));
  }
  return v;
}

void expect(std::string_view s, std::size_t pos, char c, std::string_view text) {
  if (pos >= s.size() || (s[pos] != c && !(c == 'T' && s[pos] == ' '))) {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is malformed", text));
  }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const std::string_view s = text;
  const int y = digits(s, 0, 4, text);
  expect(s, 4, '-', text);
  const int mo = digits(s, 5, 2, text);
  expect(s, 7, '-', text);
  const int d = digits(s, 8, 2, text);
  expect(s, 10, 'T', text);
  const int h = digits(s, 11, 2, text);
  expect(s, 13, ':', text);
  const int mi = digits(s, 14, 2, text);
  expect(s, 16, ':', text);
  const int se = digits(s, 17, 2, text);
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  int offset_min = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
      const int sign = s[pos] == '+' ? 1 : -1;
      offset_min = sign * (digits(s, pos + 1, 2, text) * 60 + digits(s, pos + 4, 2, text));
      pos += 6;
    } else {
      throw Error(ErrorCode::parse, fmt::format("timestamp '{}' has a bad zone suffix", text));
    }
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) {
    throw Error(ErrorCode::parse, fmt::format("timestamp '{}' is not a valid date/time", text));
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} - minutes{offset_min};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

double hours_between(Timestamp earlier, Timestamp later) {
  return static_cast<double>((later - earlier).count()) / 3600.0;
}

}  // namespace floodscout
