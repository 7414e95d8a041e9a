#ifndef RETINT_SERIES_HPP
#define RETINT_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "retint/error.hpp"
#include "retint/time.hpp"

namespace retint {

/// Timestamped prices of one instrument sampled every `sampling_interval`.
struct PriceSeries {
  std::string instrument_id;
  std::vector<Timestamp> timestamps;
  std::vector<double> prices;
  Duration sampling_interval{86400};

  std::size_t size() const noexcept { return prices.size(); }
};

/// A run of missing samples between two consecutive observations.
struct Gap {
  std::size_t return_index; ///< return spanning the gap
  std::int64_t missing_steps;
};

struct ReturnSeries {
  std::vector<double> values;
  std::vector<Timestamp> timestamps; ///< left endpoint of each return
  std::vector<Gap> gaps;

  std::size_t size() const noexcept { return values.size(); }
};

/// Normalized absolute returns g(t).
struct VolatilitySeries {
  std::vector<double> values;
  std::vector<Timestamp> timestamps; ///< may be empty for synthetic series
  bool detrended = false;

  std::size_t size() const noexcept { return values.size(); }
};

/// Checks the PriceSeries invariants: at least two samples, strictly
/// increasing timestamps when present, every price finite and positive.
inline void validate(const PriceSeries &series) {
  if (series.prices.size() < 2)
    throw Error("price series '" + series.instrument_id +
                "' needs at least 2 samples, got " +
                std::to_string(series.prices.size()));
  if (!series.timestamps.empty() &&
      series.timestamps.size() != series.prices.size())
    throw Error("price series '" + series.instrument_id +
                "': timestamp and price counts differ");
  for (std::size_t i = 0; i < series.prices.size(); ++i) {
    const double p = series.prices[i];
    if (!(p > 0.0) || !std::isfinite(p))
      throw DomainError("price must be positive and finite", i);
  }
  for (std::size_t i = 1; i < series.timestamps.size(); ++i)
    if (series.timestamps[i] <= series.timestamps[i - 1])
      throw DomainError("timestamps must be strictly increasing", i);
}

/// G(i) = ln Y(i+1) - ln Y(i) between consecutive available samples.
/// Spacings longer than the sampling interval are reported as gaps.
inline ReturnSeries log_returns(const PriceSeries &series) {
  validate(series);
  ReturnSeries out;
  const std::size_t n = series.prices.size();
  out.values.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    out.values[i] = std::log(series.prices[i + 1]) - std::log(series.prices[i]);

  if (!series.timestamps.empty()) {
    out.timestamps.assign(series.timestamps.begin(),
                          series.timestamps.end() - 1);
    const auto step = series.sampling_interval.count();
    if (step > 0) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto dt =
            (series.timestamps[i + 1] - series.timestamps[i]).count();
        if (dt > step)
          out.gaps.push_back({i, dt / step - 1 + (dt % step != 0 ? 1 : 0)});
      }
    }
  }
  return out;
}

/// g(t) = |G(t)| / sqrt(<G^2> - <G>^2) with full-sample time averages.
inline VolatilitySeries normalize_volatility(std::span<const double> returns) {
  const std::size_t n = returns.size();
  if (n == 0)
    throw DegenerateSeriesError("cannot normalize an empty return series");
  double mean = 0.0;
  for (double g : returns)
    mean += g;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double g : returns)
    var += (g - mean) * (g - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw DegenerateSeriesError(
        "return series has zero standard deviation; cannot normalize");

  VolatilitySeries out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = std::abs(returns[i]) / sd;
  return out;
}

inline VolatilitySeries normalize_volatility(const ReturnSeries &returns) {
  VolatilitySeries out = normalize_volatility(std::span<const double>(returns.values));
  out.timestamps = returns.timestamps;
  return out;
}

// --- intraday pattern -------------------------------------------------------

/// Trading-session layout used to map timestamps to time-of-day slots.
/// Slot s covers [open + s*slot_width, open + (s+1)*slot_width).
struct SessionCalendar {
  Duration open{9 * 3600};
  Duration close{15 * 3600};
  Duration slot_width{60};

  std::size_t slot_count() const {
    if (slot_width.count() <= 0 || close <= open)
      throw ParameterError("session calendar needs open < close and a positive slot width");
    return static_cast<std::size_t>((close - open).count() / slot_width.count() +
                                    ((close - open).count() % slot_width.count() != 0));
  }
};

/// Slot and session of every observation of a series.
struct SlotAssignment {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> slot;     ///< npos when outside session hours
  std::vector<std::int64_t> session; ///< e.g. day number
  std::size_t slot_count = 0;

  std::size_t size() const noexcept { return slot.size(); }
};

inline SlotAssignment assign_slots(std::span<const Timestamp> timestamps,
                                   const SessionCalendar &calendar) {
  using namespace std::chrono;
  SlotAssignment out;
  out.slot_count = calendar.slot_count();
  out.slot.reserve(timestamps.size());
  out.session.reserve(timestamps.size());
  for (const Timestamp t : timestamps) {
    const auto day_start = floor<days>(t);
    const Duration tod = t - day_start;
    out.session.push_back(day_start.time_since_epoch().count());
    if (tod < calendar.open || tod >= calendar.close)
      out.slot.push_back(SlotAssignment::npos);
    else
      out.slot.push_back(static_cast<std::size_t>((tod - calendar.open).count() /
                                                  calendar.slot_width.count()));
  }
  return out;
}

/// Observation i sits in slot i mod period of session i / period.
inline SlotAssignment periodic_slots(std::size_t n, std::size_t period) {
  if (period == 0)
    throw ParameterError("slot period must be positive");
  SlotAssignment out;
  out.slot_count = period;
  out.slot.resize(n);
  out.session.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.slot[i] = i % period;
    out.session[i] = static_cast<std::int64_t>(i / period);
  }
  return out;
}

/// Cross-session average volatility per time-of-day slot.
struct IntradayPattern {
  std::vector<double> slot_means; ///< NaN marks an empty slot
  std::vector<std::size_t> slot_counts;

  bool empty(std::size_t slot) const {
    return slot >= slot_counts.size() || slot_counts[slot] == 0;
  }

  /// Pattern with the given positive per-slot levels, e.g. a known profile.
  static IntradayPattern from_levels(std::span<const double> levels) {
    IntradayPattern p;
    p.slot_means.assign(levels.begin(), levels.end());
    p.slot_counts.assign(levels.size(), 1);
    return p;
  }
};

inline IntradayPattern build_intraday_pattern(const VolatilitySeries &vol,
                                              const SlotAssignment &slots) {
  if (slots.size() != vol.size())
    throw ParameterError("slot assignment length does not match the series");
  std::size_t sessions = 0;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (i == 0 || slots.session[i] != slots.session[i - 1])
      ++sessions;
  if (sessions < 2)
    throw InsufficientSessionsError(sessions);

  IntradayPattern p;
  std::vector<double> sums(slots.slot_count, 0.0);
  p.slot_counts.assign(slots.slot_count, 0);
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const std::size_t s = slots.slot[i];
    if (s == SlotAssignment::npos)
      continue;
    sums[s] += vol.values[i];
    ++p.slot_counts[s];
  }
  p.slot_means.resize(slots.slot_count);
  for (std::size_t s = 0; s < slots.slot_count; ++s)
    p.slot_means[s] = p.slot_counts[s] == 0
                          ? std::numeric_limits<double>::quiet_NaN()
                          : sums[s] / static_cast<double>(p.slot_counts[s]);
  return p;
}

inline IntradayPattern build_intraday_pattern(const VolatilitySeries &vol,
                                              const SessionCalendar &calendar) {
  if (vol.timestamps.size() != vol.size())
    throw ParameterError("intraday pattern needs timestamps on every observation");
  return build_intraday_pattern(vol, assign_slots(vol.timestamps, calendar));
}

/// g'(t) = g(t) / A(slot(t)).
inline VolatilitySeries intraday_detrend(const VolatilitySeries &vol,
                                         const IntradayPattern &pattern,
                                         const SlotAssignment &slots) {
  if (slots.size() != vol.size())
    throw ParameterError("slot assignment length does not match the series");
  VolatilitySeries out = vol;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const std::size_t s = slots.slot[i];
    if (s == SlotAssignment::npos)
      throw DomainError("observation lies outside session hours", i);
    if (pattern.empty(s))
      throw DetrendError("intraday pattern has no observations", s);
    const double level = pattern.slot_means[s];
    if (!(level > 0.0))
      throw DetrendError("intraday pattern mean is not positive", s);
    out.values[i] = vol.values[i] / level;
  }
  out.detrended = true;
  return out;
}

inline VolatilitySeries intraday_detrend(const VolatilitySeries &vol,
                                         const IntradayPattern &pattern,
                                         const SessionCalendar &calendar) {
  if (vol.timestamps.size() != vol.size())
    throw ParameterError("intraday detrending needs timestamps on every observation");
  return intraday_detrend(vol, pattern, assign_slots(vol.timestamps, calendar));
}

} // namespace retint

#endif // RETINT_SERIES_HPP
