#ifndef RETINT_MEMORY_HPP
#define RETINT_MEMORY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "retint/distribution.hpp"
#include "retint/error.hpp"
#include "retint/intervals.hpp"
#include "retint/random.hpp"

namespace retint {

/// P_q(tau | tau0) for tau0 in one value-ordered subset.
struct ConditionalPDF {
  std::size_t subset_index = 1; ///< 1-based
  double range_min = 0.0;       ///< smallest conditioning value (scaled for mixtures)
  double range_max = 0.0;
  std::vector<double> sample;   ///< successors tau_{i+1} / <tau>
  ScaledPDF scaled_points;
  double q = 0.0;
};

/// <tau | tau0> / <tau> against tau0 / <tau> over value-ordered subsets.
struct ConditionalMeanCurve {
  std::vector<double> bin_centers;
  std::vector<double> means;
  std::vector<double> standard_errors;
  std::vector<std::size_t> counts;
  std::vector<double> successor_sums; ///< unscaled sums of successors per bin
  double normalizer = 1.0;            ///< <tau> used for scaling
  double q = 0.0;

  std::size_t bins() const noexcept { return means.size(); }
};

namespace detail {

/// Intervals of one or more sequences laid end to end. Successor links
/// never cross from one sequence to the next.
struct PairTable {
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::vector<double> values;
  std::vector<std::size_t> successor;
  std::vector<std::size_t> order; ///< indices by value, ties by position

  std::size_t size() const noexcept { return values.size(); }

  void append(std::span<const Interval> intervals, double scale) {
    const std::size_t base = values.size();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      values.push_back(static_cast<double>(intervals[i]) / scale);
      successor.push_back(i + 1 < intervals.size() ? base + i + 1 : none);
    }
  }

  void sort() {
    order.resize(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [this](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  }

  /// Positions [first, last) in `order` of block k (0-based) of n_blocks.
  std::pair<std::size_t, std::size_t> block(std::size_t k, std::size_t n_blocks) const {
    const std::size_t n = values.size();
    return {k * n / n_blocks, (k + 1) * n / n_blocks};
  }
};

inline PairTable single_table(const IntervalSequence &seq) {
  PairTable t;
  t.append(seq.intervals, 1.0);
  t.sort();
  return t;
}

/// Each sequence is scaled by its own mean before pooling.
inline PairTable pooled_table(std::span<const IntervalSequence> seqs) {
  PairTable t;
  for (const auto &seq : seqs) {
    if (!(seq.mean_interval > 0.0))
      throw ParameterError("pooled sequences need a positive mean interval");
    t.append(seq.intervals, seq.mean_interval);
  }
  t.sort();
  return t;
}

inline void check_subsets(std::size_t n, std::size_t n_subsets) {
  if (n_subsets < 1)
    throw ParameterError("number of subsets must be positive");
  if (n < 2 * n_subsets)
    throw ParameterError("need at least " + std::to_string(2 * n_subsets) +
                         " intervals for " + std::to_string(n_subsets) +
                         " subsets, got " + std::to_string(n));
}

inline ConditionalPDF conditional_pdf(const PairTable &t, std::size_t n_subsets,
                                      std::size_t k, double normalizer, double q,
                                      BinningMode mode, std::size_t n_bins) {
  check_subsets(t.size(), n_subsets);
  if (k < 1 || k > n_subsets)
    throw ParameterError("subset index must lie in [1, " + std::to_string(n_subsets) + "]");
  const auto [first, last] = t.block(k - 1, n_subsets);

  ConditionalPDF out;
  out.subset_index = k;
  out.q = q;
  out.range_min = t.values[t.order[first]];
  out.range_max = t.values[t.order[last - 1]];
  for (std::size_t pos = first; pos < last; ++pos) {
    const std::size_t next = t.successor[t.order[pos]];
    if (next != PairTable::none)
      out.sample.push_back(t.values[next] / normalizer);
  }
  if (out.sample.empty())
    throw InsufficientPairsError("subset " + std::to_string(k) + " of " +
                                 std::to_string(n_subsets) +
                                 " has no successor intervals");
  if (normalizer != 1.0) {
    // values are whole intervals; bin them on the integer lattice
    std::vector<Interval> raw(out.sample.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      raw[i] = static_cast<Interval>(std::llround(out.sample[i] * normalizer));
    out.scaled_points =
        scale_pdf(pdf_estimate(make_sequence(q, std::move(raw), 0), mode, n_bins), normalizer, q);
  } else {
    out.scaled_points =
        scale_pdf(pdf_estimate(std::span<const double>(out.sample), mode, n_bins), 1.0, q);
  }
  return out;
}

inline ConditionalMeanCurve conditional_mean_curve(const PairTable &t, std::size_t n_bins,
                                                   double normalizer, double q) {
  check_subsets(t.size(), n_bins);
  ConditionalMeanCurve out;
  out.normalizer = normalizer;
  out.q = q;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const auto [first, last] = t.block(b, n_bins);
    double cond_sum = 0.0, sum = 0.0;
    std::size_t count = 0;
    for (std::size_t pos = first; pos < last; ++pos) {
      const std::size_t i = t.order[pos];
      cond_sum += t.values[i];
      if (t.successor[i] != PairTable::none) {
        sum += t.values[t.successor[i]];
        ++count;
      }
    }
    if (count == 0)
      throw InsufficientPairsError("bin " + std::to_string(b + 1) + " of " +
                                   std::to_string(n_bins) + " has no successor intervals");
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t pos = first; pos < last; ++pos) {
      const std::size_t next = t.successor[t.order[pos]];
      if (next != PairTable::none)
        ss += (t.values[next] - mean) * (t.values[next] - mean);
    }
    const double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;

    out.bin_centers.push_back(cond_sum / static_cast<double>(last - first) / normalizer);
    out.means.push_back(mean / normalizer);
    out.standard_errors.push_back(sd / std::sqrt(static_cast<double>(count)) / normalizer);
    out.counts.push_back(count);
    out.successor_sums.push_back(sum);
  }
  return out;
}

} // namespace detail

/// Conditional distribution of tau_{i+1} given tau_i in subset k (1-based)
/// of n_subsets equal-count blocks of the value-sorted intervals. Ties are
/// ordered by position in time. Output is scaled by the full-sequence mean.
inline ConditionalPDF conditional_pdf(const IntervalSequence &seq, std::size_t n_subsets,
                                      std::size_t k,
                                      BinningMode mode = BinningMode::logarithmic,
                                      std::size_t n_bins = 20) {
  return detail::conditional_pdf(detail::single_table(seq), n_subsets, k,
                                 seq.mean_interval, seq.threshold_q, mode, n_bins);
}

/// Mixture form: each sequence is scaled by its own mean, subsets are formed
/// over the pooled scaled values, and pairs stay within a sequence.
inline ConditionalPDF conditional_pdf(std::span<const IntervalSequence> seqs,
                                      std::size_t n_subsets, std::size_t k,
                                      BinningMode mode = BinningMode::logarithmic,
                                      std::size_t n_bins = 20) {
  const double q = seqs.empty() ? 0.0 : seqs.front().threshold_q;
  return detail::conditional_pdf(detail::pooled_table(seqs), n_subsets, k, 1.0, q,
                                 mode, n_bins);
}

/// All n_subsets conditional distributions built from one sort.
inline std::vector<ConditionalPDF> conditional_pdfs(const IntervalSequence &seq,
                                                    std::size_t n_subsets,
                                                    BinningMode mode = BinningMode::logarithmic,
                                                    std::size_t n_bins = 20) {
  const auto table = detail::single_table(seq);
  std::vector<ConditionalPDF> out;
  for (std::size_t k = 1; k <= n_subsets; ++k)
    out.push_back(detail::conditional_pdf(table, n_subsets, k, seq.mean_interval,
                                          seq.threshold_q, mode, n_bins));
  return out;
}

inline ConditionalMeanCurve conditional_mean_curve(const IntervalSequence &seq,
                                                   std::size_t n_bins = 8) {
  return detail::conditional_mean_curve(detail::single_table(seq), n_bins,
                                        seq.mean_interval, seq.threshold_q);
}

inline ConditionalMeanCurve conditional_mean_curve(std::span<const IntervalSequence> seqs,
                                                   std::size_t n_bins = 8) {
  const double q = seqs.empty() ? 0.0 : seqs.front().threshold_q;
  return detail::conditional_mean_curve(detail::pooled_table(seqs), n_bins, 1.0, q);
}

/// Uniform random permutation of the intervals; the mean is carried over
/// unchanged.
inline IntervalSequence shuffle_intervals(const IntervalSequence &seq, std::uint64_t seed) {
  IntervalSequence out = seq;
  shuffle_in_place(std::span<Interval>(out.intervals), seed);
  return out;
}

} // namespace retint

#endif // RETINT_MEMORY_HPP
