#ifndef RETINT_CSV_HPP
#define RETINT_CSV_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retint/error.hpp"
#include "retint/series.hpp"
#include "retint/time.hpp"

namespace retint {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

namespace detail {

/// Most frequent positive spacing between samples.
inline Duration infer_sampling_interval(std::span<const Timestamp> ts) {
  std::map<std::int64_t, std::size_t> freq;
  for (std::size_t i = 1; i < ts.size(); ++i)
    ++freq[(ts[i] - ts[i - 1]).count()];
  if (freq.empty())
    return Duration{86400};
  auto best = std::max_element(freq.begin(), freq.end(), [](const auto &a, const auto &b) {
    return a.second < b.second;
  });
  return Duration{best->first};
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

} // namespace detail

/// Reads a `timestamp,price` CSV. Out-of-order rows are sorted (with a
/// warning); duplicate timestamps are rejected.
inline PriceSeries ingest_csv(std::istream &in, std::string instrument_id,
                              std::vector<std::string> *warnings = nullptr) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw ParseError("missing header `timestamp,price`", 1);
  ++line_no;
  std::string_view header = detail::trim(line);
  if (header.substr(0, 3) == "\xEF\xBB\xBF")
    header.remove_prefix(3);
  if (header != "timestamp,price")
    throw ParseError("expected header `timestamp,price`", line_no);

  std::vector<std::pair<Timestamp, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty())
      continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two comma-separated fields", line_no);
    const auto ts = parse_timestamp(detail::trim(row.substr(0, comma)));
    if (!ts)
      throw ParseError("invalid ISO-8601 timestamp", line_no);
    const auto price = parse_double(row.substr(comma + 1));
    if (!price)
      throw ParseError("non-numeric price", line_no);
    if (!(*price > 0.0) || !std::isfinite(*price))
      throw ParseError("price must be positive", line_no);
    rows.emplace_back(*ts, *price);
  }

  if (!std::is_sorted(rows.begin(), rows.end(),
                      [](const auto &a, const auto &b) { return a.first < b.first; })) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    if (warnings)
      warnings->push_back(instrument_id + ": input rows were not in time order and have been sorted");
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first)
      throw Error(instrument_id + ": duplicate timestamp " + format_timestamp(rows[i].first));

  PriceSeries series;
  series.instrument_id = std::move(instrument_id);
  series.timestamps.reserve(rows.size());
  series.prices.reserve(rows.size());
  for (const auto &[t, p] : rows) {
    series.timestamps.push_back(t);
    series.prices.push_back(p);
  }
  series.sampling_interval = detail::infer_sampling_interval(series.timestamps);
  return series;
}

/// File form; the instrument id is the file stem.
inline PriceSeries ingest_csv(const std::filesystem::path &path,
                              std::vector<std::string> *warnings = nullptr) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return ingest_csv(in, path.stem().string(), warnings);
}

inline void write_csv(std::ostream &out, const PriceSeries &series) {
  out << "timestamp,price\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.timestamps[i]) << ',' << format_double(series.prices[i]) << '\n';
}

/// Part one holds samples strictly before `cut`, part two the rest.
inline std::pair<PriceSeries, PriceSeries> split_by_date(const PriceSeries &series, Timestamp cut) {
  if (series.timestamps.empty())
    throw Error("cannot split a series without timestamps");
  if (cut <= series.timestamps.front() || cut > series.timestamps.back())
    throw Error("split date " + format_timestamp(cut) + " lies outside the span " +
                format_timestamp(series.timestamps.front()) + " .. " +
                format_timestamp(series.timestamps.back()));
  const auto it = std::lower_bound(series.timestamps.begin(), series.timestamps.end(), cut);
  const auto head = static_cast<std::size_t>(it - series.timestamps.begin());

  std::pair<PriceSeries, PriceSeries> parts;
  auto fill = [&](PriceSeries &part, std::size_t first, std::size_t last, const char *suffix) {
    part.instrument_id = series.instrument_id + suffix;
    part.sampling_interval = series.sampling_interval;
    part.timestamps.assign(series.timestamps.begin() + static_cast<std::ptrdiff_t>(first),
                           series.timestamps.begin() + static_cast<std::ptrdiff_t>(last));
    part.prices.assign(series.prices.begin() + static_cast<std::ptrdiff_t>(first),
                       series.prices.begin() + static_cast<std::ptrdiff_t>(last));
  };
  fill(parts.first, 0, head, ".pre");
  fill(parts.second, head, series.size(), ".post");
  return parts;
}

} // namespace retint

#endif // RETINT_CSV_HPP
