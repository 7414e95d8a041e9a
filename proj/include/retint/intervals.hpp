#ifndef RETINT_INTERVALS_HPP
#define RETINT_INTERVALS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "retint/error.hpp"
#include "retint/series.hpp"

namespace retint {

using Interval = std::int64_t;

/// Return intervals tau(q) between successive exceedances of q, in
/// sampling steps, kept in temporal order.
struct IntervalSequence {
  double threshold_q = 0.0;
  std::vector<Interval> intervals;
  double mean_interval = 0.0;
  std::size_t source_length = 0;

  std::size_t size() const noexcept { return intervals.size(); }
  bool empty() const noexcept { return intervals.empty(); }
};

/// Arithmetic mean of intervals. Sums stay exact below 2^53.
inline double mean_of(std::span<const Interval> intervals) {
  if (intervals.empty())
    return 0.0;
  Interval sum = 0;
  for (Interval t : intervals)
    sum += t;
  return static_cast<double>(sum) / static_cast<double>(intervals.size());
}

inline IntervalSequence make_sequence(double q, std::vector<Interval> intervals,
                                      std::size_t source_length) {
  IntervalSequence seq;
  seq.threshold_q = q;
  seq.mean_interval = mean_of(intervals);
  seq.intervals = std::move(intervals);
  seq.source_length = source_length;
  return seq;
}

/// Indices t with g(t) > q. Values equal to q are not events.
inline std::vector<std::size_t> find_events(std::span<const double> g, double q) {
  std::vector<std::size_t> events;
  for (std::size_t t = 0; t < g.size(); ++t)
    if (g[t] > q)
      events.push_back(t);
  return events;
}

struct ExtractOptions {
  /// Session id per observation. When set, intervals whose two events fall
  /// in different sessions are dropped.
  std::span<const std::int64_t> session_of{};
};

inline IntervalSequence extract_intervals(std::span<const double> g, double q,
                                          const ExtractOptions &options = {}) {
  if (!(q > 0.0))
    throw ParameterError("threshold q must be positive");
  if (g.size() < 2)
    throw ParameterError("volatility series needs at least 2 samples");
  const bool drop_cross_session = !options.session_of.empty();
  if (drop_cross_session && options.session_of.size() != g.size())
    throw ParameterError("session ids do not match the series length");

  const std::vector<std::size_t> events = find_events(g, q);
  if (events.size() < 2)
    throw InsufficientEventsError(q, events.size());

  std::vector<Interval> intervals;
  intervals.reserve(events.size() - 1);
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (drop_cross_session &&
        options.session_of[events[i]] != options.session_of[events[i - 1]])
      continue;
    intervals.push_back(static_cast<Interval>(events[i] - events[i - 1]));
  }
  if (intervals.empty())
    throw InsufficientEventsError(q, 1);
  return make_sequence(q, std::move(intervals), g.size());
}

inline IntervalSequence extract_intervals(const VolatilitySeries &vol, double q,
                                          const ExtractOptions &options = {}) {
  return extract_intervals(std::span<const double>(vol.values), q, options);
}

/// One sequence per threshold, in the order given.
inline std::vector<IntervalSequence>
split_by_threshold_set(const VolatilitySeries &vol, std::span<const double> qs,
                       const ExtractOptions &options = {}) {
  if (qs.empty())
    throw ParameterError("threshold list is empty");
  std::vector<IntervalSequence> out;
  out.reserve(qs.size());
  for (double q : qs)
    out.push_back(extract_intervals(vol, q, options));
  return out;
}

/// tau / <tau> for every interval of the sequence.
inline std::vector<double> scaled_intervals(const IntervalSequence &seq) {
  std::vector<double> x(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i)
    x[i] = static_cast<double>(seq.intervals[i]) / seq.mean_interval;
  return x;
}

/// Pools several instruments: each sequence is scaled by its own mean
/// before concatenation.
inline std::vector<double> pool_scaled(std::span<const IntervalSequence> seqs) {
  std::vector<double> pooled;
  for (const auto &seq : seqs) {
    const auto x = scaled_intervals(seq);
    pooled.insert(pooled.end(), x.begin(), x.end());
  }
  return pooled;
}

} // namespace retint

#endif // RETINT_INTERVALS_HPP
