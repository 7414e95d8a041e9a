#ifndef RETINT_SYNTHETIC_HPP
#define RETINT_SYNTHETIC_HPP

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "retint/error.hpp"
#include "retint/fft.hpp"
#include "retint/random.hpp"
#include "retint/series.hpp"
#include "retint/time.hpp"

namespace retint {

enum class GeneratorKind { iid_gaussian, longrange_correlated };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::iid_gaussian;
  std::size_t length = 1 << 16;
  double gamma = 0.3; ///< autocorrelation C(t) ~ t^-gamma, correlated kind only
  std::uint64_t seed = 1;
  /// Positive multiplicative levels applied slot by slot (i mod size).
  std::vector<double> intraday_pattern;
  Timestamp start = std::chrono::sys_days{std::chrono::year{1984} / 1 / 1};
  Duration step{86400};
};

inline void validate(const GeneratorSpec &spec) {
  if (spec.length < 2)
    throw ParameterError("generator length must be at least 2");
  if (spec.kind == GeneratorKind::longrange_correlated && !(spec.gamma > 0.0 && spec.gamma < 1.0))
    throw ParameterError("correlation exponent gamma must lie in (0, 1)");
  if (spec.step.count() <= 0)
    throw ParameterError("generator step must be positive");
  for (double p : spec.intraday_pattern)
    if (!(p > 0.0))
      throw ParameterError("intraday pattern levels must be positive");
}

/// Sample times for n observations. Without a pattern they are evenly spaced;
/// with an L-slot pattern each day holds L samples starting at the
/// time-of-day of `start`.
inline std::vector<Timestamp> synthetic_timestamps(const GeneratorSpec &spec, std::size_t n) {
  std::vector<Timestamp> ts(n);
  const std::size_t period = spec.intraday_pattern.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (period == 0) {
      ts[i] = spec.start + spec.step * static_cast<std::int64_t>(i);
    } else {
      const auto day = std::chrono::days{static_cast<std::int64_t>(i / period)};
      ts[i] = spec.start + day + spec.step * static_cast<std::int64_t>(i % period);
    }
  }
  return ts;
}

namespace detail {

inline void apply_pattern(std::span<double> values, std::span<const double> pattern) {
  if (pattern.empty())
    return;
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] *= pattern[i % pattern.size()];
}

} // namespace detail

/// I.i.d. standard normal returns.
inline ReturnSeries gen_iid_gaussian(const GeneratorSpec &spec) {
  validate(spec);
  Rng rng(splitmix64(spec.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  ReturnSeries out;
  out.values.resize(spec.length);
  for (double &v : out.values)
    v = normal(rng);
  detail::apply_pattern(out.values, spec.intraday_pattern);
  out.timestamps = synthetic_timestamps(spec, spec.length);
  return out;
}

/// Gaussian signal with power-law autocorrelation C(t) ~ t^-gamma, made by
/// Fourier filtering: white noise is transformed, its spectrum shaped by
/// |f|^(-(1-gamma)/2), and transformed back. Lengths that are not a power
/// of two are generated at the next power and truncated. The result has
/// zero mean and unit variance before any intraday pattern is applied.
inline ReturnSeries gen_longrange_signal(const GeneratorSpec &spec) {
  validate(spec);
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0))
    throw ParameterError("correlation exponent gamma must lie in (0, 1)");
  const std::size_t n = next_power_of_two(spec.length);
  Rng rng(splitmix64(spec.seed));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::complex<double>> a(n);
  for (auto &x : a)
    x = {normal(rng), 0.0};
  fft(a);
  const double exponent = -(1.0 - spec.gamma) / 2.0;
  a[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
    a[k] *= std::pow(f, exponent);
  }
  fft(a, true);

  ReturnSeries out;
  out.values.resize(spec.length);
  double mean = 0.0;
  for (std::size_t i = 0; i < spec.length; ++i) {
    out.values[i] = a[i].real();
    mean += out.values[i];
  }
  mean /= static_cast<double>(spec.length);
  double var = 0.0;
  for (double v : out.values)
    var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(spec.length));
  for (double &v : out.values)
    v = (v - mean) / sd;
  detail::apply_pattern(out.values, spec.intraday_pattern);
  out.timestamps = synthetic_timestamps(spec, spec.length);
  return out;
}

/// Volatility |x(t)| / sd(x) of the long-range correlated signal.
inline VolatilitySeries gen_longrange_correlated(const GeneratorSpec &spec) {
  return normalize_volatility(gen_longrange_signal(spec));
}

/// Returns (signed) for either generator kind.
inline ReturnSeries generate_returns(const GeneratorSpec &spec) {
  return spec.kind == GeneratorKind::iid_gaussian ? gen_iid_gaussian(spec)
                                                  : gen_longrange_signal(spec);
}

/// Multiplies each observation by the level of its slot; the exact inverse
/// of intraday_detrend with the same levels.
inline VolatilitySeries impose_intraday_pattern(const VolatilitySeries &vol,
                                                std::span<const double> pattern,
                                                const SlotAssignment &slots) {
  if (pattern.empty())
    throw ParameterError("intraday pattern is empty");
  for (std::size_t s = 0; s < pattern.size(); ++s)
    if (!(pattern[s] > 0.0))
      throw DetrendError("intraday pattern level is not positive", s);
  if (slots.size() != vol.size())
    throw ParameterError("slot assignment length does not match the series");
  VolatilitySeries out = vol;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const std::size_t s = slots.slot[i];
    if (s == SlotAssignment::npos || s >= pattern.size())
      throw DomainError("observation has no pattern slot", i);
    out.values[i] = vol.values[i] * pattern[s];
  }
  return out;
}

/// Periodic form: observation i uses slot i mod pattern size.
inline VolatilitySeries impose_intraday_pattern(const VolatilitySeries &vol,
                                                std::span<const double> pattern) {
  if (pattern.empty())
    throw ParameterError("intraday pattern is empty");
  return impose_intraday_pattern(vol, pattern, periodic_slots(vol.size(), pattern.size()));
}

/// Prices P(0) = p0, P(i+1) = P(i) exp(scale * G(i)) over n+1 sample times.
inline PriceSeries prices_from_returns(const ReturnSeries &returns, const GeneratorSpec &spec,
                                       std::string instrument_id, double p0 = 100.0,
                                       double scale = 0.01) {
  PriceSeries out;
  out.instrument_id = std::move(instrument_id);
  out.sampling_interval = spec.step;
  out.timestamps = synthetic_timestamps(spec, returns.size() + 1);
  out.prices.resize(returns.size() + 1);
  out.prices[0] = p0;
  double log_p = std::log(p0);
  for (std::size_t i = 0; i < returns.size(); ++i) {
    log_p += scale * returns.values[i];
    out.prices[i + 1] = std::exp(log_p);
  }
  return out;
}

} // namespace retint

#endif // RETINT_SYNTHETIC_HPP
