#ifndef RETINT_DISTRIBUTION_HPP
#define RETINT_DISTRIBUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "retint/error.hpp"
#include "retint/intervals.hpp"
#include "retint/ks.hpp"

namespace retint {

enum class BinningMode { linear, logarithmic };

/// Histogram density estimate. Bins are [e_i, e_{i+1}), the last one closed.
struct BinnedPDF {
  std::vector<double> bin_edges;
  std::vector<double> densities;
  std::vector<std::size_t> counts;
  BinningMode binning_mode = BinningMode::linear;
  std::string warning;

  std::size_t bins() const noexcept { return densities.size(); }
  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double center(std::size_t i) const {
    return 0.5 * (bin_edges[i] + bin_edges[i + 1]);
  }
};

/// Scaled density y = P_q(tau) <tau> against x = tau / <tau>.
struct ScaledPDF {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> widths; ///< bin widths in scaled units
  double q = 0.0;
};

namespace detail {

inline BinnedPDF fill_histogram(std::span<const double> values,
                                std::vector<double> edges, BinningMode mode) {
  BinnedPDF pdf;
  pdf.binning_mode = mode;
  pdf.bin_edges = std::move(edges);
  const std::size_t nb = pdf.bin_edges.size() - 1;
  pdf.counts.assign(nb, 0);
  for (double v : values) {
    auto it = std::upper_bound(pdf.bin_edges.begin(), pdf.bin_edges.end(), v);
    std::size_t b = static_cast<std::size_t>(it - pdf.bin_edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= nb)
      b = nb - 1;
    ++pdf.counts[b];
  }
  const double n = static_cast<double>(values.size());
  pdf.densities.resize(nb);
  for (std::size_t i = 0; i < nb; ++i)
    pdf.densities[i] = static_cast<double>(pdf.counts[i]) / (n * pdf.width(i));
  return pdf;
}

inline std::vector<double> linear_edges(double lo, double hi, std::size_t n_bins) {
  std::vector<double> edges(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
  edges.back() = hi;
  return edges;
}

inline std::vector<double> log_edges(double lo, double hi, std::size_t n_bins) {
  std::vector<double> edges(n_bins + 1);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i <= n_bins; ++i)
    edges[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                  static_cast<double>(n_bins));
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

} // namespace detail

/// Density estimate of real-valued samples (e.g. pooled scaled intervals).
/// Log mode requires positive samples.
inline BinnedPDF pdf_estimate(std::span<const double> values, BinningMode mode,
                              std::size_t n_bins) {
  if (values.empty())
    throw ParameterError("cannot estimate a density from an empty sample");
  if (n_bins < 2)
    throw ParameterError("at least 2 bins are required");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    BinnedPDF pdf = detail::fill_histogram(values, {lo - 0.5, lo + 0.5}, BinningMode::linear);
    pdf.warning = "all samples identical; using a single linear bin";
    return pdf;
  }
  if (mode == BinningMode::logarithmic) {
    if (!(lo > 0.0))
      throw ParameterError("logarithmic binning needs positive samples");
    return detail::fill_histogram(values, detail::log_edges(lo, hi, n_bins), mode);
  }
  return detail::fill_histogram(values, detail::linear_edges(lo, hi, n_bins), mode);
}

/// Density estimate of integer intervals. Edges span [min - 1/2, max + 1/2];
/// logarithmic edges are snapped to half-integers so that every bin holds at
/// least one integer, which can leave fewer than n_bins bins.
inline BinnedPDF pdf_estimate(const IntervalSequence &seq, BinningMode mode,
                              std::size_t n_bins) {
  if (seq.empty())
    throw ParameterError("cannot estimate a density from an empty sequence");
  if (n_bins < 2)
    throw ParameterError("at least 2 bins are required");
  std::vector<double> values(seq.intervals.begin(), seq.intervals.end());
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 0.5, hi = *hi_it + 0.5;

  if (mode == BinningMode::logarithmic) {
    if (*lo_it == *hi_it) {
      BinnedPDF pdf = detail::fill_histogram(values, {lo, hi}, BinningMode::linear);
      pdf.warning = "all intervals identical; log binning replaced by a single linear bin";
      return pdf;
    }
    std::vector<double> edges = detail::log_edges(lo, hi, n_bins);
    for (double &e : edges)
      e = std::round(e - 0.5) + 0.5;
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return detail::fill_histogram(values, std::move(edges), mode);
  }
  return detail::fill_histogram(values, detail::linear_edges(lo, hi, n_bins), mode);
}

/// x = center / <tau>, y = density * <tau>.
inline ScaledPDF scale_pdf(const BinnedPDF &pdf, double mean_interval, double q = 0.0) {
  if (!(mean_interval > 0.0))
    throw ParameterError("mean interval must be positive");
  ScaledPDF out;
  out.q = q;
  out.x.resize(pdf.bins());
  out.y.resize(pdf.bins());
  out.widths.resize(pdf.bins());
  for (std::size_t i = 0; i < pdf.bins(); ++i) {
    out.x[i] = pdf.center(i) / mean_interval;
    out.y[i] = pdf.densities[i] * mean_interval;
    out.widths[i] = pdf.width(i) / mean_interval;
  }
  return out;
}

inline ScaledPDF scale_pdf(const BinnedPDF &pdf, const IntervalSequence &seq) {
  return scale_pdf(pdf, seq.mean_interval, seq.threshold_q);
}

/// Empirical CDF of integer intervals in scaled units x = tau / scale, with
/// each value spread uniformly over [tau - 1/2, tau + 1/2]. Removes the
/// lattice artifact of comparing samples whose means differ slightly.
class LatticeCdf {
public:
  LatticeCdf(std::span<const Interval> values, double scale) : scale_(scale) {
    if (values.empty())
      throw ParameterError("lattice CDF needs a non-empty sample");
    if (!(scale > 0.0))
      throw ParameterError("lattice CDF needs a positive scale");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo < 0)
      throw ParameterError("lattice CDF needs non-negative values");
    cum_.assign(static_cast<std::size_t>(*hi) + 1, 0.0);
    for (Interval v : values)
      cum_[static_cast<std::size_t>(v)] += 1.0;
    double run = 0.0;
    const double n = static_cast<double>(values.size());
    for (double &c : cum_) {
      run += c;
      c = run / n;
    }
    cum_.back() = 1.0;
    min_ = *lo;
  }

  double operator()(double x) const {
    const double u = x * scale_ - 0.5;
    const double k = std::floor(u);
    return at(k) + (u - k) * (at(k + 1.0) - at(k));
  }

  /// Scaled positions where the CDF changes slope.
  void breakpoints(std::vector<double> &out) const {
    for (Interval j = min_ - 1; j < static_cast<Interval>(cum_.size()); ++j)
      out.push_back((static_cast<double>(j) + 0.5) / scale_);
  }

  double scale() const noexcept { return scale_; }

private:
  double at(double k) const {
    if (k < 0.0)
      return 0.0;
    if (k >= static_cast<double>(cum_.size() - 1))
      return 1.0;
    return cum_[static_cast<std::size_t>(k)];
  }

  std::vector<double> cum_; ///< cum_[k] = fraction of values <= k
  double scale_;
  Interval min_ = 0;
};

/// Two-sample KS distance between continuity-corrected tau/<tau> samples.
/// Both CDFs are piecewise linear, so the supremum sits on a breakpoint.
inline double lattice_ks(const IntervalSequence &a, const IntervalSequence &b) {
  const LatticeCdf fa(a.intervals, a.mean_interval);
  const LatticeCdf fb(b.intervals, b.mean_interval);
  std::vector<double> xs;
  fa.breakpoints(xs);
  fb.breakpoints(xs);
  double d = 0.0;
  for (double x : xs)
    d = std::max(d, std::abs(fa(x) - fb(x)));
  return d;
}

using DistanceMatrix = std::vector<std::vector<double>>;

/// Pairwise two-sample KS distances between scaled samples.
inline DistanceMatrix collapse_distance(std::span<const std::vector<double>> samples) {
  std::vector<std::vector<double>> sorted(samples.begin(), samples.end());
  for (auto &s : sorted) {
    if (s.empty())
      throw ParameterError("collapse distance needs non-empty samples");
    std::sort(s.begin(), s.end());
  }
  const std::size_t n = sorted.size();
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = ks_two_sample_sorted<double>(sorted[i], sorted[j]);
  return d;
}

/// Pairwise distances between the tau/<tau> samples of the sequences,
/// measured with lattice_ks.
inline DistanceMatrix collapse_distance(std::span<const IntervalSequence> sequences) {
  if (sequences.size() < 2)
    throw ParameterError("collapse distance needs at least 2 sequences");
  for (const auto &seq : sequences)
    if (seq.empty())
      throw ParameterError("collapse distance needs non-empty sequences");
  const std::size_t n = sequences.size();
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = lattice_ks(sequences[i], sequences[j]);
  return d;
}

/// KS distance between {tau/<tau>} and the unit-mean exponential law.
inline double poisson_deviation(std::span<const double> scaled) {
  return ks_one_sample(scaled, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
}

/// Continuity-corrected form for integer intervals (see LatticeCdf). The
/// exponential CDF is concave, so besides the breakpoints the supremum can
/// only sit where its slope matches a linear piece.
inline double poisson_deviation(const IntervalSequence &seq) {
  if (seq.empty())
    throw ParameterError("poisson deviation needs a non-empty sequence");
  const LatticeCdf g(seq.intervals, seq.mean_interval);
  const auto expo = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  std::vector<double> xs;
  g.breakpoints(xs);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::abs(g(xs[i]) - expo(xs[i])));
    if (i + 1 < xs.size()) {
      const double slope = (g(xs[i + 1]) - g(xs[i])) / (xs[i + 1] - xs[i]);
      if (slope > 0.0) {
        const double x = -std::log(slope);
        if (x > xs[i] && x < xs[i + 1])
          d = std::max(d, std::abs(g(x) - expo(x)));
      }
    }
  }
  // beyond the last breakpoint the CDF is 1
  return std::max(d, 1.0 - expo(xs.back()));
}

/// Event rate of the source series: (number of events) / (series length).
inline double event_probability(const IntervalSequence &seq) {
  if (seq.source_length == 0)
    throw ParameterError("sequence carries no source length");
  return static_cast<double>(seq.size() + 1) / static_cast<double>(seq.source_length);
}

/// KS distance between the intervals and the geometric law
/// P(tau = k) = p (1 - p)^(k - 1), k >= 1.
inline double geometric_deviation(const IntervalSequence &seq, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw ParameterError("geometric success probability must lie in (0, 1]");
  const double log_fail = std::log1p(-p);
  return ks_discrete(std::span<const Interval>(seq.intervals), [=](std::int64_t k) {
    return k < 1 ? 0.0 : -std::expm1(static_cast<double>(k) * log_fail);
  });
}

inline double geometric_deviation(const IntervalSequence &seq) {
  return geometric_deviation(seq, event_probability(seq));
}

} // namespace retint

#endif // RETINT_DISTRIBUTION_HPP
