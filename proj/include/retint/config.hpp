#ifndef RETINT_CONFIG_HPP
#define RETINT_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retint/csv.hpp"
#include "retint/distribution.hpp"
#include "retint/error.hpp"
#include "retint/series.hpp"
#include "retint/time.hpp"

namespace retint {

/// Environment variable that overrides the configured output directory.
inline constexpr const char *kOutputDirEnv = "RETINT_OUT";

struct AnalysisConfig {
  std::vector<std::filesystem::path> inputs;
  std::vector<double> thresholds{1.0, 1.25, 1.5, 1.75, 2.0};
  BinningMode binning = BinningMode::logarithmic;
  std::size_t bins = 30;
  std::size_t n_subsets = 8;
  std::uint64_t seed = 1;
  std::size_t ensemble = 100;
  /// Intraday session layout; when set the volatility is detrended.
  std::optional<SessionCalendar> calendar;
  bool drop_session_gaps = false;
  std::optional<Timestamp> split_date;
  bool pooled_median = false;
  std::filesystem::path output_dir = "retint-out";
  std::size_t workers = 0; ///< 0: one per hardware thread
};

/// Default inflation/deflation boundary: the first day of 1990.
inline Timestamp default_split_date() {
  return std::chrono::sys_days{std::chrono::year{1990} / 1 / 1};
}

/// Checks the config and puts thresholds in ascending order.
inline void validate(AnalysisConfig &config) {
  if (config.thresholds.empty())
    throw ConfigError("thresholds list is empty");
  for (double q : config.thresholds)
    if (!(q > 0.0) || !std::isfinite(q))
      throw ConfigError("threshold " + format_double(q) + " is not positive");
  std::sort(config.thresholds.begin(), config.thresholds.end());
  config.thresholds.erase(std::unique(config.thresholds.begin(), config.thresholds.end()),
                          config.thresholds.end());
  if (config.ensemble < 1)
    throw ConfigError("surrogate ensemble size must be at least 1");
  if (config.bins < 2)
    throw ConfigError("at least 2 bins are required");
  if (config.n_subsets < 1)
    throw ConfigError("number of subsets must be positive");
  if (config.drop_session_gaps && !config.calendar)
    throw ConfigError("drop_session_gaps needs a session calendar");
  if (config.calendar)
    (void)config.calendar->slot_count();
}

namespace detail {

inline bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "1" || v == "true" || v == "yes" || v == "on")
    return true;
  if (v == "0" || v == "false" || v == "no" || v == "off")
    return false;
  throw ParseError("expected a boolean, got '" + std::string(v) + "'", line);
}

inline std::uint64_t parse_unsigned(std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ParseError("expected a non-negative integer, got '" + std::string(v) + "'", line);
  return out;
}

inline double parse_real(std::string_view v, std::size_t line) {
  const auto d = parse_double(v);
  if (!d)
    throw ParseError("expected a number, got '" + std::string(v) + "'", line);
  return *d;
}

inline SessionCalendar &calendar_of(AnalysisConfig &c) {
  if (!c.calendar)
    c.calendar = SessionCalendar{};
  return *c.calendar;
}

} // namespace detail

/// Applies one `key=value` setting. Repeatable keys (`input`, `q`) append.
inline void apply_setting(AnalysisConfig &c, std::string_view key, std::string_view value,
                          std::size_t line, bool &thresholds_seen) {
  if (key == "input") {
    c.inputs.emplace_back(std::string(value));
  } else if (key == "q" || key == "thresholds") {
    if (!thresholds_seen) {
      c.thresholds.clear();
      thresholds_seen = true;
    }
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const auto item = detail::trim(value.substr(pos, comma - pos));
      if (!item.empty())
        c.thresholds.push_back(detail::parse_real(item, line));
      if (comma == std::string_view::npos)
        break;
      pos = comma + 1;
    }
  } else if (key == "bins") {
    c.bins = detail::parse_unsigned(value, line);
  } else if (key == "log_bins") {
    c.binning = detail::parse_bool(value, line) ? BinningMode::logarithmic : BinningMode::linear;
  } else if (key == "subsets") {
    c.n_subsets = detail::parse_unsigned(value, line);
  } else if (key == "seed") {
    c.seed = detail::parse_unsigned(value, line);
  } else if (key == "ensemble") {
    c.ensemble = detail::parse_unsigned(value, line);
  } else if (key == "split_date") {
    if (value == "none") {
      c.split_date.reset();
    } else if (value == "default") {
      c.split_date = default_split_date();
    } else {
      const auto t = parse_timestamp(value);
      if (!t)
        throw ParseError("invalid split date '" + std::string(value) + "'", line);
      c.split_date = *t;
    }
  } else if (key == "session_open" || key == "session_close") {
    const auto t = parse_time_of_day(value);
    if (!t)
      throw ParseError("expected HH:MM[:SS], got '" + std::string(value) + "'", line);
    (key == "session_open" ? detail::calendar_of(c).open : detail::calendar_of(c).close) = *t;
  } else if (key == "slot_seconds") {
    detail::calendar_of(c).slot_width = Duration{static_cast<std::int64_t>(detail::parse_unsigned(value, line))};
  } else if (key == "drop_session_gaps") {
    c.drop_session_gaps = detail::parse_bool(value, line);
  } else if (key == "pooled_median") {
    c.pooled_median = detail::parse_bool(value, line);
  } else if (key == "out") {
    c.output_dir = std::string(value);
  } else if (key == "workers") {
    c.workers = detail::parse_unsigned(value, line);
  } else {
    throw ParseError("unknown key '" + std::string(key) + "'", line);
  }
}

/// Line-oriented `key=value` format; `#` starts a comment. The output
/// directory can be overridden through the RETINT_OUT environment variable.
inline AnalysisConfig parse_config(std::istream &in, const AnalysisConfig &defaults = {}) {
  AnalysisConfig c = defaults;
  bool thresholds_seen = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty())
      continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value", line);
    apply_setting(c, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)), line,
                  thresholds_seen);
  }
  if (const char *env = std::getenv(kOutputDirEnv); env && *env)
    c.output_dir = env;
  return c;
}

inline AnalysisConfig load_config(const std::filesystem::path &path,
                                  const AnalysisConfig &defaults = {}) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  AnalysisConfig c = parse_config(in, defaults);
  // relative input paths resolve against the config file's directory
  for (std::size_t i = defaults.inputs.size(); i < c.inputs.size(); ++i)
    if (c.inputs[i].is_relative())
      c.inputs[i] = path.parent_path() / c.inputs[i];
  return c;
}

} // namespace retint

#endif // RETINT_CONFIG_HPP
