#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "retint/intervals.hpp"
#include "retint/series.hpp"

using namespace retint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PriceSeries prices_of(std::vector<double> p) {
  PriceSeries s;
  s.instrument_id = "t";
  s.prices = std::move(p);
  return s;
}

VolatilitySeries vol_of(std::vector<double> v) {
  VolatilitySeries s;
  s.values = std::move(v);
  return s;
}

} // namespace

TEST_CASE("log_returns of a constant price are zero") {
  const auto r = log_returns(prices_of({5, 5, 5}));
  REQUIRE(r.values == std::vector<double>{0.0, 0.0});
}

TEST_CASE("log_returns of exact exponentials") {
  const double e = std::numbers::e;
  const auto r = log_returns(prices_of({1, e, e * e * e}));
  REQUIRE(r.size() == 2);
  CHECK_THAT(r.values[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(r.values[1], WithinAbs(2.0, 1e-15));
}

TEST_CASE("log_returns hand-evaluated one-percent move") {
  const auto r = log_returns(prices_of({100, 101}));
  REQUIRE(r.size() == 1);
  // ln(1.01) = 0.01 - 0.01^2/2 + 0.01^3/3 - ...
  CHECK_THAT(r.values[0], WithinAbs(0.0099503308531681, 1e-15));
}

TEST_CASE("log_returns rejects a non-positive price and names its index") {
  try {
    log_returns(prices_of({1, 2, 0, 3}));
    FAIL("expected DomainError");
  } catch (const DomainError &e) {
    CHECK(e.index() == 2);
  }
  CHECK_THROWS_AS(log_returns(prices_of({1, -1})), DomainError);
  CHECK_THROWS_AS(log_returns(prices_of({1})), Error);
}

TEST_CASE("log_returns reports timestamp gaps") {
  auto s = prices_of({1, 2, 3, 4});
  const Timestamp t0{std::chrono::seconds{0}};
  s.timestamps = {t0, t0 + std::chrono::days{1}, t0 + std::chrono::days{4},
                  t0 + std::chrono::days{5}};
  const auto r = log_returns(s);
  REQUIRE(r.timestamps.size() == 3);
  CHECK(r.timestamps[1] == s.timestamps[1]);
  REQUIRE(r.gaps.size() == 1);
  CHECK(r.gaps[0].return_index == 1);
  CHECK(r.gaps[0].missing_steps == 2);
}

TEST_CASE("log_returns is invariant under price scaling") {
  const std::vector<double> p{3.0, 3.3, 2.9, 4.1, 4.0};
  std::vector<double> scaled;
  for (double v : p)
    scaled.push_back(v * 17.25);
  const auto a = log_returns(prices_of(p));
  const auto b = log_returns(prices_of(scaled));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK_THAT(b.values[i], WithinAbs(a.values[i], 1e-14));
}

TEST_CASE("normalize_volatility of symmetric alternation is all ones") {
  for (double a : {0.001, 1.0, 250.0}) {
    const std::vector<double> r{a, -a, a, -a};
    const auto g = normalize_volatility(std::span<const double>(r));
    for (double v : g.values)
      CHECK_THAT(v, WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("normalize_volatility hand-evaluated example") {
  const std::vector<double> r{1, -1, 2, -2};
  const auto g = normalize_volatility(std::span<const double>(r));
  // mean 0, <G^2> = 10/4 = 2.5
  const double sd = std::sqrt(2.5);
  CHECK_THAT(sd, WithinAbs(1.58114, 1e-5));
  CHECK_THAT(g.values[0], WithinAbs(0.63246, 1e-5));
  CHECK_THAT(g.values[1], WithinAbs(0.63246, 1e-5));
  CHECK_THAT(g.values[2], WithinAbs(1.26491, 1e-5));
  CHECK_THAT(g.values[3], WithinAbs(1.26491, 1e-5));
  CHECK_FALSE(g.detrended);
}

TEST_CASE("normalize_volatility subtracts the mean inside the root") {
  // mean 2, variance 1: g = |G| / 1
  const std::vector<double> r{1, 3, 1, 3};
  const auto g = normalize_volatility(std::span<const double>(r));
  CHECK_THAT(g.values[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.values[1], WithinAbs(3.0, 1e-15));
}

TEST_CASE("normalize_volatility rejects degenerate series") {
  const std::vector<double> zeros{0, 0, 0};
  CHECK_THROWS_AS(normalize_volatility(std::span<const double>(zeros)), DegenerateSeriesError);
  const std::vector<double> constant{0.5, 0.5};
  CHECK_THROWS_AS(normalize_volatility(std::span<const double>(constant)), DegenerateSeriesError);
}

TEST_CASE("normalization and extraction are invariant under return scaling") {
  std::vector<double> r;
  for (int i = 0; i < 500; ++i)
    r.push_back(std::sin(0.37 * i) * std::cos(0.011 * i * i) + 0.05);
  const auto g = normalize_volatility(std::span<const double>(r));
  for (double c : {-3.0, 0.125, 1024.0}) {
    std::vector<double> rc;
    for (double v : r)
      rc.push_back(c * v);
    const auto gc = normalize_volatility(std::span<const double>(rc));
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK_THAT(gc.values[i], WithinRel(g.values[i], 1e-12));
    for (double q : {0.5, 1.0, 1.5}) {
      // Same events index-for-index: compare event sets, not just intervals.
      CHECK(find_events(gc.values, q) == find_events(g.values, q));
    }
  }
}

// --- intraday ---------------------------------------------------------------

TEST_CASE("intraday pattern of two identical sessions") {
  const auto v = vol_of({1, 2, 3, 1, 2, 3});
  const auto p = build_intraday_pattern(v, periodic_slots(6, 3));
  CHECK(p.slot_means == std::vector<double>{1, 2, 3});
  CHECK(p.slot_counts == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("intraday pattern averages across sessions") {
  const auto p = build_intraday_pattern(vol_of({1, 3, 3, 1}), periodic_slots(4, 2));
  CHECK(p.slot_means == std::vector<double>{2, 2});
}

TEST_CASE("intraday pattern needs two sessions") {
  CHECK_THROWS_AS(build_intraday_pattern(vol_of({1, 2, 3}), periodic_slots(3, 3)),
                  InsufficientSessionsError);
}

TEST_CASE("intraday pattern marks unobserved slots empty") {
  using namespace std::chrono;
  SessionCalendar cal{hours{9}, hours{10}, minutes{30}};
  auto v = vol_of({1, 2, 3});
  const Timestamp d0{sys_days{year{2001} / 1 / 2}};
  const Timestamp d1{sys_days{year{2001} / 1 / 3}};
  v.timestamps = {d0 + hours{9}, d1 + hours{9}, d1 + hours{9} + minutes{10}};
  const auto p = build_intraday_pattern(v, cal);
  REQUIRE(p.slot_means.size() == 2);
  CHECK(p.slot_means[0] == 2.0);
  CHECK(p.empty(1));
  CHECK(std::isnan(p.slot_means[1]));
}

TEST_CASE("calendar slots follow time of day") {
  using namespace std::chrono;
  SessionCalendar cal{hours{9}, hours{15}, hours{1}};
  CHECK(cal.slot_count() == 6);
  const Timestamp d{sys_days{year{2003} / 5 / 6}};
  const std::vector<Timestamp> ts{d + hours{9}, d + hours{14} + minutes{59}, d + hours{15},
                                  d + hours{8}};
  const auto a = assign_slots(ts, cal);
  CHECK(a.slot[0] == 0);
  CHECK(a.slot[1] == 5);
  CHECK(a.slot[2] == SlotAssignment::npos);
  CHECK(a.slot[3] == SlotAssignment::npos);
  CHECK(a.session[0] == a.session[3]);
}

TEST_CASE("detrending divides by the slot level") {
  const auto out = intraday_detrend(vol_of({2, 4}), IntradayPattern::from_levels(std::vector{1.0, 2.0}),
                                    periodic_slots(2, 2));
  CHECK(out.values == std::vector<double>{2, 2});
  CHECK(out.detrended);
}

TEST_CASE("detrending a series by its own repeated pattern gives ones") {
  const auto v = vol_of({0.5, 2, 1.5, 0.5, 2, 1.5, 0.5, 2, 1.5});
  const auto slots = periodic_slots(v.size(), 3);
  const auto out = intraday_detrend(v, build_intraday_pattern(v, slots), slots);
  for (double x : out.values)
    CHECK_THAT(x, WithinAbs(1.0, 1e-15));
}

TEST_CASE("detrending with a self-built pattern gives unit slot means") {
  std::vector<double> g;
  for (int i = 0; i < 997; ++i)
    g.push_back(std::abs(std::sin(1.3 * i)) * (1.0 + (i % 7)));
  const auto v = vol_of(g);
  const auto slots = periodic_slots(v.size(), 7);
  const auto out = intraday_detrend(v, build_intraday_pattern(v, slots), slots);
  const auto again = build_intraday_pattern(out, slots);
  for (double m : again.slot_means)
    CHECK_THAT(m, WithinAbs(1.0, 1e-9));
}

TEST_CASE("detrending rejects empty and zero slots") {
  IntradayPattern p;
  p.slot_means = {1.0, std::nan(""), 0.0};
  p.slot_counts = {1, 0, 4};
  try {
    intraday_detrend(vol_of({1, 1}), p, periodic_slots(2, 3));
    FAIL("expected DetrendError");
  } catch (const DetrendError &e) {
    CHECK(e.slot() == 1);
  }
  SlotAssignment s = periodic_slots(3, 3);
  s.slot = {0, 2, 0};
  try {
    intraday_detrend(vol_of({1, 1, 1}), p, s);
    FAIL("expected DetrendError");
  } catch (const DetrendError &e) {
    CHECK(e.slot() == 2);
  }
}
