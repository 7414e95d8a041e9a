#ifndef RETINT_CLUSTERS_HPP
#define RETINT_CLUSTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "retint/error.hpp"
#include "retint/intervals.hpp"
#include "retint/random.hpp"
#include "retint/series.hpp"

namespace retint {

enum class Label : std::uint8_t { below, above };

/// Sample median; the mean of the two central values for even counts.
template <typename T> double median_of(std::span<const T> values) {
  if (values.empty())
    throw ParameterError("median of an empty sample");
  std::vector<T> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = static_cast<double>(v[mid]);
  if (v.size() % 2 == 1)
    return upper;
  const double lower =
      static_cast<double>(*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return 0.5 * (lower + upper);
}

/// ABOVE iff tau > median; ties at the median are BELOW.
inline std::vector<Label> median_split(std::span<const Interval> intervals, double median) {
  std::vector<Label> labels(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i)
    labels[i] = static_cast<double>(intervals[i]) > median ? Label::above : Label::below;
  return labels;
}

inline std::vector<Label> median_split(const IntervalSequence &seq) {
  return median_split(seq.intervals, median_of<Interval>(seq.intervals));
}

/// Maximal runs of equal labels. Runs alternate starting from `first`.
struct ClusterRuns {
  std::vector<std::size_t> above_sizes;
  std::vector<std::size_t> below_sizes;
  Label first = Label::below;
  double median = std::numeric_limits<double>::quiet_NaN();
  double q = 0.0;

  const std::vector<std::size_t> &sizes(Label side) const {
    return side == Label::above ? above_sizes : below_sizes;
  }
};

inline ClusterRuns clusters(std::span<const Label> labels) {
  if (labels.empty())
    throw ParameterError("cannot form clusters from an empty label sequence");
  ClusterRuns runs;
  runs.first = labels.front();
  std::size_t len = 1;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i < labels.size() && labels[i] == labels[i - 1]) {
      ++len;
      continue;
    }
    (labels[i - 1] == Label::above ? runs.above_sizes : runs.below_sizes).push_back(len);
    len = 1;
  }
  return runs;
}

/// Splits at the sequence's own median, or at `pooled_median` when given.
inline ClusterRuns cluster_runs(const IntervalSequence &seq,
                                double pooled_median = std::numeric_limits<double>::quiet_NaN()) {
  const double median =
      std::isnan(pooled_median) ? median_of<Interval>(seq.intervals) : pooled_median;
  const auto labels = median_split(seq.intervals, median);
  ClusterRuns runs = clusters(labels);
  runs.median = median;
  runs.q = seq.threshold_q;
  return runs;
}

/// Label sequence rebuilt from its runs.
inline std::vector<Label> expand(const ClusterRuns &runs) {
  std::vector<Label> labels;
  Label side = runs.first;
  std::size_t ia = 0, ib = 0;
  while (ia < runs.above_sizes.size() || ib < runs.below_sizes.size()) {
    auto &idx = side == Label::above ? ia : ib;
    const auto &sizes = runs.sizes(side);
    if (idx >= sizes.size())
      throw ParameterError("cluster runs do not alternate");
    labels.insert(labels.end(), sizes[idx++], side);
    side = side == Label::above ? Label::below : Label::above;
  }
  return labels;
}

struct SurvivalPoint {
  std::size_t k;
  double survival; ///< P(size >= k)
};

/// Complementary cumulative distribution of cluster sizes on one side,
/// for k = 1 .. largest size.
inline std::vector<SurvivalPoint> cluster_survival(const ClusterRuns &runs, Label side) {
  const auto &sizes = runs.sizes(side);
  if (sizes.empty())
    throw ParameterError("no clusters on the requested side");
  const std::size_t max_size = *std::max_element(sizes.begin(), sizes.end());
  std::vector<std::size_t> at_least(max_size + 2, 0);
  for (std::size_t s : sizes)
    ++at_least[s];
  for (std::size_t k = max_size; k >= 1; --k)
    at_least[k] += at_least[k + 1];
  std::vector<SurvivalPoint> out;
  out.reserve(max_size);
  const double n = static_cast<double>(sizes.size());
  for (std::size_t k = 1; k <= max_size; ++k)
    out.push_back({k, static_cast<double>(at_least[k]) / n});
  return out;
}

/// Survival read off at k, zero beyond the largest cluster.
inline double survival_at(std::span<const SurvivalPoint> curve, std::size_t k) {
  if (k == 0)
    return 1.0;
  return k <= curve.size() ? curve[k - 1].survival : 0.0;
}

/// Run-length law of i.i.d. fair labels, P(size >= k) = 2^(1-k), and the
/// binomial standard error of its estimate from n_runs clusters.
inline double fair_run_survival(std::size_t k) { return std::ldexp(1.0, 1 - static_cast<int>(k)); }

inline double fair_run_sigma(std::size_t k, std::size_t n_runs) {
  const double p = fair_run_survival(k);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_runs));
}

/// Uniform random permutation of the volatility values. Timestamps stay in
/// place so slot structure is kept.
inline VolatilitySeries shuffle_volatility(const VolatilitySeries &vol, std::uint64_t seed) {
  if (vol.values.empty())
    throw ParameterError("cannot shuffle an empty volatility series");
  VolatilitySeries out = vol;
  shuffle_in_place(std::span<double>(out.values), seed);
  return out;
}

/// Spread of surrogate survival curves over an ensemble of seeds.
struct SurvivalEnvelope {
  std::vector<std::size_t> k;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lo; ///< ensemble minimum
  std::vector<double> hi; ///< ensemble maximum
  std::size_t seeds = 0;
};

inline SurvivalEnvelope survival_envelope(std::span<const std::vector<SurvivalPoint>> curves,
                                          std::size_t k_max) {
  SurvivalEnvelope env;
  env.seeds = curves.size();
  if (curves.empty())
    return env;
  for (std::size_t k = 1; k <= k_max; ++k) {
    double sum = 0.0, sumsq = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &c : curves) {
      const double s = survival_at(c, k);
      sum += s;
      sumsq += s * s;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const double n = static_cast<double>(curves.size());
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1)) : 0.0;
    env.k.push_back(k);
    env.mean.push_back(mean);
    env.sd.push_back(std::sqrt(var));
    env.lo.push_back(lo);
    env.hi.push_back(hi);
  }
  return env;
}

} // namespace retint

#endif // RETINT_CLUSTERS_HPP
