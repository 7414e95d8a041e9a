#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "retint/ks.hpp"
#include "retint/memory.hpp"
#include "retint/synthetic.hpp"

using namespace retint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

IntervalSequence correlated_sequence(double q, std::size_t n, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::longrange_correlated;
  spec.length = n;
  spec.seed = seed;
  return extract_intervals(gen_longrange_correlated(spec), q);
}

IntervalSequence alternating(std::size_t n) {
  std::vector<Interval> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(i % 2 == 0 ? 1 : 9);
  return make_sequence(1.0, std::move(v), 0);
}

} // namespace

TEST_CASE("low subsets condition on the smallest values") {
  // With eight distinct values in time order the first block of K = 4 is
  // {1, 2}, whose successors are {2, 3}. Eight subsets of eight values
  // (one value each) fall below the two-per-subset minimum.
  const auto eight = make_sequence(1.0, {1, 2, 3, 4, 5, 6, 7, 8}, 0);
  CHECK_THROWS_AS(conditional_pdf(eight, 8, 1), ParameterError);
  const auto c4 = conditional_pdf(eight, 4, 1);
  CHECK(c4.subset_index == 1);
  CHECK(c4.range_min == 1.0);
  CHECK(c4.range_max == 2.0);
  REQUIRE(c4.sample.size() == 2);
  CHECK_THAT(c4.sample[0] * eight.mean_interval, WithinAbs(2.0, 1e-12));
  CHECK_THAT(c4.sample[1] * eight.mean_interval, WithinAbs(3.0, 1e-12));

  // Smallest admissible size: blocks of two.
  std::vector<Interval> v(16);
  std::iota(v.begin(), v.end(), Interval{1});
  const auto c = conditional_pdf(make_sequence(1.0, v, 0), 8, 1);
  CHECK(c.range_max == 2.0);
  CHECK(c.sample.size() == 2);
}

TEST_CASE("alternation: lowest subset is followed by the large value") {
  const auto seq = alternating(64);
  const auto c = conditional_pdf(seq, 8, 1);
  for (double x : c.sample)
    CHECK_THAT(x * seq.mean_interval, WithinAbs(9.0, 1e-12));
}

TEST_CASE("conditional pdf preconditions") {
  const auto seq = alternating(16);
  CHECK_THROWS_AS(conditional_pdf(seq, 8, 0), ParameterError);
  CHECK_THROWS_AS(conditional_pdf(seq, 8, 9), ParameterError);
  CHECK_THROWS_AS(conditional_pdf(seq, 9, 1), ParameterError);
  CHECK_THROWS_AS(conditional_mean_curve(alternating(15), 8), ParameterError);
}

TEST_CASE("a subset holding only final intervals has no pairs") {
  // Within one sequence only the last interval lacks a successor, so this
  // needs a mixture: both sequences end on their largest value.
  std::vector<Interval> v(15, 1);
  v.push_back(100);
  const std::vector<IntervalSequence> seqs{make_sequence(1.0, v, 0), make_sequence(1.0, v, 0)};
  CHECK_THROWS_AS(conditional_pdf(seqs, 16, 16), InsufficientPairsError);
  CHECK_THROWS_AS(conditional_mean_curve(seqs, 16), InsufficientPairsError);
  CHECK_NOTHROW(conditional_pdf(seqs, 16, 15));
}

TEST_CASE("subsets have near-equal counts and cover every successor once") {
  const auto seq = correlated_sequence(1.5, 1 << 14, 3);
  for (std::size_t K : {2u, 5u, 8u}) {
    const auto all = conditional_pdfs(seq, K);
    REQUIRE(all.size() == K);
    std::vector<double> pooled;
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto &c : all) {
      // block sizes differ by at most one; one block loses its final pair
      lo = std::min(lo, c.sample.size());
      hi = std::max(hi, c.sample.size());
      pooled.insert(pooled.end(), c.sample.begin(), c.sample.end());
    }
    CHECK(hi - lo <= 2);
    std::vector<double> successors;
    for (std::size_t i = 1; i < seq.size(); ++i)
      successors.push_back(static_cast<double>(seq.intervals[i]) / seq.mean_interval);
    std::sort(pooled.begin(), pooled.end());
    std::sort(successors.begin(), successors.end());
    CHECK(pooled == successors);
  }
}

TEST_CASE("conditional mean curve of an alternation") {
  const auto curve = conditional_mean_curve(alternating(64), 8);
  REQUIRE(curve.bins() == 8);
  CHECK_THAT(curve.means.front(), WithinAbs(1.8, 1e-12));
  CHECK_THAT(curve.means.back(), WithinAbs(0.2, 1e-12));
  CHECK(curve.normalizer == 5.0);
}

TEST_CASE("law of total expectation holds exactly") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (double q : {1.0, 2.0}) {
      const auto seq = correlated_sequence(q, 1 << 15, seed);
      const auto curve = conditional_mean_curve(seq, 8);
      const double total = std::accumulate(curve.successor_sums.begin(), curve.successor_sums.end(), 0.0);
      const Interval exact = std::accumulate(seq.intervals.begin() + 1, seq.intervals.end(), Interval{0});
      CHECK(total == static_cast<double>(exact));
      CHECK(std::accumulate(curve.counts.begin(), curve.counts.end(), std::size_t{0}) == seq.size() - 1);
      for (std::size_t b = 0; b < curve.bins(); ++b) {
        CHECK(curve.means[b] > 0.0);
        CHECK_THAT(curve.means[b] * curve.normalizer * static_cast<double>(curve.counts[b]),
                   WithinRel(curve.successor_sums[b], 1e-12));
      }
    }
  }
}

TEST_CASE("i.i.d. geometric intervals have a flat conditional mean") {
  std::mt19937_64 rng(404);
  std::geometric_distribution<Interval> geo(0.05);
  std::vector<Interval> v(100000);
  for (auto &t : v)
    t = geo(rng) + 1;
  const auto curve = conditional_mean_curve(make_sequence(1.0, std::move(v), 0), 8);
  for (std::size_t b = 0; b < curve.bins(); ++b)
    CHECK(std::abs(curve.means[b] - 1.0) < 3.0 * curve.standard_errors[b]);
}

TEST_CASE("correlated oracle shows memory in the conditional mean") {
  for (double q : {1.0, 1.5}) {
    const auto seq = correlated_sequence(q, 1 << 18, 9);
    const auto curve = conditional_mean_curve(seq, 8);
    int inversions = 0;
    for (std::size_t b = 1; b < curve.bins(); ++b)
      if (curve.means[b] < curve.means[b - 1])
        ++inversions;
    CHECK(inversions <= 1);
    CHECK(curve.means.front() < 1.0);
    CHECK(curve.means.back() > 1.0);
    for (std::size_t b = 1; b < curve.bins(); ++b)
      CHECK(curve.bin_centers[b] >= curve.bin_centers[b - 1]);
  }
}

TEST_CASE("shuffle_intervals preserves the multiset and the mean") {
  const auto one = make_sequence(1.0, {7}, 10);
  CHECK(shuffle_intervals(one, 5).intervals == one.intervals);

  const auto seq = correlated_sequence(1.0, 1 << 14, 4);
  const auto a = shuffle_intervals(seq, 123);
  const auto b = shuffle_intervals(seq, 123);
  const auto c = shuffle_intervals(seq, 124);
  CHECK(a.intervals == b.intervals);
  CHECK(a.intervals != c.intervals);
  CHECK(a.mean_interval == seq.mean_interval);
  CHECK(std::is_permutation(a.intervals.begin(), a.intervals.end(), seq.intervals.begin()));

  const auto pa = scale_pdf(pdf_estimate(a, BinningMode::logarithmic, 20), a);
  const auto ps = scale_pdf(pdf_estimate(seq, BinningMode::logarithmic, 20), seq);
  CHECK(pa.x == ps.x);
  CHECK(pa.y == ps.y);
}

TEST_CASE("shuffled correlated intervals lose their memory") {
  const auto seq = correlated_sequence(1.0, 1 << 18, 9);
  const auto curve = conditional_mean_curve(shuffle_intervals(seq, 77), 8);
  for (std::size_t b = 0; b < curve.bins(); ++b)
    CHECK(std::abs(curve.means[b] - 1.0) < 3.0 * curve.standard_errors[b]);

  const auto sh = shuffle_intervals(seq, 78);
  const auto lo = conditional_pdf(sh, 8, 1);
  const auto hi = conditional_pdf(sh, 8, 8);
  CHECK(ks_two_sample(lo.sample, hi.sample) <
        3.0 * ks_critical_value(0.05, lo.sample.size(), hi.sample.size()));
}

TEST_CASE("shuffled lowest-subset pdf matches the unconditional law") {
  const auto seq = correlated_sequence(1.5, 1 << 15, 21);
  const auto all = scaled_intervals(seq);
  int passes = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto c = conditional_pdf(shuffle_intervals(seq, s), 8, 1);
    if (ks_two_sample(c.sample, all) <= ks_critical_value(0.01, c.sample.size(), all.size()))
      ++passes;
  }
  CHECK(passes >= 95);
}

TEST_CASE("mixture conditioning pools per-sequence scaled values") {
  const std::vector<IntervalSequence> seqs{alternating(32), make_sequence(1.0, std::vector<Interval>(32, 4), 0)};
  const auto curve = conditional_mean_curve(seqs, 4);
  CHECK(curve.normalizer == 1.0);
  CHECK(std::accumulate(curve.counts.begin(), curve.counts.end(), std::size_t{0}) == 62);
  // pairs never cross the sequence boundary
  const double total = std::accumulate(curve.successor_sums.begin(), curve.successor_sums.end(), 0.0);
  double expected = 0.0;
  for (const auto &s : seqs)
    for (std::size_t i = 1; i < s.size(); ++i)
      expected += static_cast<double>(s.intervals[i]) / s.mean_interval;
  CHECK_THAT(total, WithinRel(expected, 1e-12));
  const auto c = conditional_pdf(seqs, 4, 1);
  CHECK_FALSE(c.sample.empty());
}
