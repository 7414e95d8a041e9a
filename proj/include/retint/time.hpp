#ifndef RETINT_TIME_HPP
#define RETINT_TIME_HPP

#include <charconv>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace retint {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

namespace detail {

inline bool parse_fixed_int(std::string_view s, std::size_t pos,
                            std::size_t len, int &out) {
  if (pos + len > s.size())
    return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9')
      return false;
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

inline void append_padded(std::string &out, long long v, int width) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  if (v < 0)
    out.push_back('-');
  for (int i = static_cast<int>(digits.size()); i < width; ++i)
    out.push_back('0');
  out += digits;
}

} // namespace detail

/// Parses `YYYY-MM-DD`, optionally followed by `T` or a space and
/// `HH:MM[:SS]`, with an optional trailing `Z`. Times are taken as UTC.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
    s.remove_suffix(1);
  if (!s.empty() && s.back() == 'Z')
    s.remove_suffix(1);

  int y = 0, mo = 0, d = 0;
  if (!detail::parse_fixed_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' ||
      !detail::parse_fixed_int(s, 5, 2, mo) || s[7] != '-' ||
      !detail::parse_fixed_int(s, 8, 2, d))
    return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok())
    return std::nullopt;

  int hh = 0, mm = 0, ss = 0;
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ')
      return std::nullopt;
    if (!detail::parse_fixed_int(s, 11, 2, hh) || s.size() < 16 ||
        s[13] != ':' || !detail::parse_fixed_int(s, 14, 2, mm))
      return std::nullopt;
    if (s.size() > 16) {
      if (s.size() != 19 || s[16] != ':' ||
          !detail::parse_fixed_int(s, 17, 2, ss))
        return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 60)
      return std::nullopt;
  }
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

/// Inverse of parse_timestamp. Midnight instants print as a bare date.
inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  std::string out;
  out.reserve(19);
  detail::append_padded(out, static_cast<int>(ymd.year()), 4);
  out.push_back('-');
  detail::append_padded(out, static_cast<unsigned>(ymd.month()), 2);
  out.push_back('-');
  detail::append_padded(out, static_cast<unsigned>(ymd.day()), 2);
  const auto tod = (t - day_start).count();
  if (tod != 0) {
    out.push_back('T');
    detail::append_padded(out, tod / 3600, 2);
    out.push_back(':');
    detail::append_padded(out, (tod / 60) % 60, 2);
    out.push_back(':');
    detail::append_padded(out, tod % 60, 2);
  }
  return out;
}

/// Parses `HH:MM[:SS]` into an offset from midnight.
inline std::optional<Duration> parse_time_of_day(std::string_view s) {
  int hh = 0, mm = 0, ss = 0;
  if (s.size() < 5 || !detail::parse_fixed_int(s, 0, 2, hh) || s[2] != ':' ||
      !detail::parse_fixed_int(s, 3, 2, mm))
    return std::nullopt;
  if (s.size() > 5 &&
      (s.size() != 8 || s[5] != ':' || !detail::parse_fixed_int(s, 6, 2, ss)))
    return std::nullopt;
  if (hh > 24 || mm > 59 || ss > 59)
    return std::nullopt;
  return Duration{hh * 3600 + mm * 60 + ss};
}

} // namespace retint

#endif // RETINT_TIME_HPP
