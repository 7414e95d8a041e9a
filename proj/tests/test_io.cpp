#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retint/config.hpp"
#include "retint/csv.hpp"
#include "retint/output.hpp"
#include "retint/synthetic.hpp"

using namespace retint;
using namespace std::chrono;

namespace {

Timestamp on(int y, unsigned m, unsigned d) { return sys_days{year{y} / month{m} / d}; }

PriceSeries daily(std::size_t n, Timestamp start) {
  PriceSeries s;
  s.instrument_id = "x";
  for (std::size_t i = 0; i < n; ++i) {
    s.timestamps.push_back(start + days{static_cast<int>(i)});
    s.prices.push_back(10.0 + static_cast<double>(i));
  }
  return s;
}

} // namespace

TEST_CASE("timestamps parse and format") {
  CHECK(parse_timestamp("1990-01-01") == on(1990, 1, 1));
  CHECK(parse_timestamp("1990-01-01T09:30") == on(1990, 1, 1) + hours{9} + minutes{30});
  CHECK(parse_timestamp("1990-01-01 09:30:15Z") == on(1990, 1, 1) + hours{9} + minutes{30} + seconds{15});
  CHECK_FALSE(parse_timestamp("1990-13-01"));
  CHECK_FALSE(parse_timestamp("1990-02-30"));
  CHECK_FALSE(parse_timestamp("19900101"));
  CHECK_FALSE(parse_timestamp("1990-01-01T25:00"));
  CHECK(format_timestamp(on(2004, 2, 29)) == "2004-02-29");
  CHECK(format_timestamp(on(2004, 2, 29) + seconds{3661}) == "2004-02-29T01:01:01");
  CHECK(parse_time_of_day("09:00") == Duration{9 * 3600});
  CHECK_FALSE(parse_time_of_day("9am"));
}

TEST_CASE("ingest a two-row file") {
  std::istringstream in("timestamp,price\n2001-01-02,10.5\n2001-01-03,11\n");
  const auto s = ingest_csv(in, "abc");
  CHECK(s.size() == 2);
  CHECK(s.instrument_id == "abc");
  CHECK(s.prices[1] == 11.0);
  CHECK(s.sampling_interval == days{1});
}

TEST_CASE("ingest reports the failing line") {
  std::istringstream in("timestamp,price\n"
                        "2001-01-02,1\n2001-01-03,1\n2001-01-04,1\n2001-01-05,1\n2001-01-06,1\n"
                        "2001-01-07,abc\n");
  try {
    ingest_csv(in, "bad");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("ingest rejects bad headers, prices and duplicates") {
  std::istringstream no_header("2001-01-02,1\n");
  CHECK_THROWS_AS(ingest_csv(no_header, "x"), ParseError);
  std::istringstream negative("timestamp,price\n2001-01-02,-1\n");
  CHECK_THROWS_AS(ingest_csv(negative, "x"), ParseError);
  std::istringstream dup("timestamp,price\n2001-01-02,1\n2001-01-03,2\n2001-01-02,3\n");
  CHECK_THROWS_AS(ingest_csv(dup, "x"), Error);
  std::istringstream bom("\xEF\xBB\xBFtimestamp,price\r\n2001-01-02,1\r\n2001-01-03,2\r\n");
  CHECK(ingest_csv(bom, "x").size() == 2);
}

TEST_CASE("unsorted input is sorted with a warning") {
  std::istringstream in("timestamp,price\n2001-01-04,3\n2001-01-02,1\n2001-01-03,2\n");
  std::vector<std::string> warnings;
  const auto s = ingest_csv(in, "u", &warnings);
  CHECK(s.prices == std::vector<double>{1, 2, 3});
  CHECK(warnings.size() == 1);
}

TEST_CASE("a missing file is an I/O error") {
  CHECK_THROWS_AS(ingest_csv(std::filesystem::path("/nonexistent/dir/x.csv")), IoError);
}

TEST_CASE("synthetic prices round-trip bit-exactly through CSV") {
  GeneratorSpec spec;
  spec.length = 2000;
  spec.seed = 99;
  spec.step = minutes{1};
  spec.start = on(1999, 3, 1) + hours{9};
  const auto p = prices_from_returns(gen_iid_gaussian(spec), spec, "syn");
  std::stringstream buf;
  write_csv(buf, p);
  const auto back = ingest_csv(buf, "syn");
  CHECK(back.prices == p.prices);
  CHECK(back.timestamps == p.timestamps);
  CHECK(back.sampling_interval == minutes{1});
}

TEST_CASE("double formatting is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 2.5})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(2.5) == "2.5");
  CHECK(format_double(1.0) == "1");
  CHECK_FALSE(parse_double("1.5x"));
  CHECK_FALSE(parse_double(""));
}

TEST_CASE("split_by_date") {
  const auto s = daily(10, on(2000, 1, 1));
  CHECK_THROWS_AS(split_by_date(s, on(1999, 1, 1)), Error);
  CHECK_THROWS_AS(split_by_date(s, on(2000, 1, 1)), Error);
  CHECK_THROWS_AS(split_by_date(s, on(2000, 2, 1)), Error);

  // cut between samples i = 3 and i + 1
  const auto [a, b] = split_by_date(s, on(2000, 1, 4) + hours{12});
  CHECK(a.size() == 4);
  CHECK(b.size() == 6);
  // cut exactly on a sample: that sample starts part two
  const auto [c, d] = split_by_date(s, on(2000, 1, 5));
  CHECK(c.size() == 4);
  CHECK(d.timestamps.front() == on(2000, 1, 5));

  auto joined = a.prices;
  joined.insert(joined.end(), b.prices.begin(), b.prices.end());
  CHECK(joined == s.prices);
  CHECK(a.instrument_id == "x.pre");
  CHECK(b.instrument_id == "x.post");
}

TEST_CASE("default split cuts a 1984-2004 span in two") {
  GeneratorSpec spec;
  spec.length = 7300;
  const auto p = prices_from_returns(gen_iid_gaussian(spec), spec, "syn");
  CHECK(p.timestamps.front() == on(1984, 1, 1));
  CHECK(p.timestamps.back() > on(2003, 12, 1));
  const auto [pre, post] = split_by_date(p, default_split_date());
  CHECK(pre.size() > 0);
  CHECK(post.size() > 0);
  CHECK(pre.timestamps.back() < on(1990, 1, 1));
  CHECK(post.timestamps.front() == on(1990, 1, 1));
}

TEST_CASE("config parsing") {
  ::unsetenv(kOutputDirEnv);
  std::istringstream in("# comment\n"
                        "input = a.csv\n"
                        "q = 2, 1\n"
                        "q = 1.5\n"
                        "bins=12\nlog_bins=false\nsubsets=4\nseed=7\nensemble=20\n"
                        "split_date=1995-06-01\n"
                        "session_open=09:00\nsession_close=11:30\nslot_seconds=300\n"
                        "drop_session_gaps=true\nout=results  # trailing comment\n");
  AnalysisConfig c = parse_config(in);
  validate(c);
  CHECK(c.inputs.size() == 1);
  CHECK(c.thresholds == std::vector<double>{1, 1.5, 2});
  CHECK(c.bins == 12);
  CHECK(c.binning == BinningMode::linear);
  CHECK(c.n_subsets == 4);
  CHECK(c.seed == 7);
  CHECK(c.ensemble == 20);
  CHECK(c.split_date == on(1995, 6, 1));
  REQUIRE(c.calendar);
  CHECK(c.calendar->slot_count() == 30);
  CHECK(c.drop_session_gaps);
  CHECK(c.output_dir == "results");
}

TEST_CASE("config errors") {
  std::istringstream unknown("colour=blue\n");
  CHECK_THROWS_AS(parse_config(unknown), ParseError);
  std::istringstream no_eq("bins 3\n");
  CHECK_THROWS_AS(parse_config(no_eq), ParseError);
  std::istringstream bad_num("\n\nbins=many\n");
  try {
    parse_config(bad_num);
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }

  AnalysisConfig empty;
  empty.thresholds.clear();
  CHECK_THROWS_AS(validate(empty), ConfigError);
  AnalysisConfig neg;
  neg.thresholds = {1.0, -2.0};
  CHECK_THROWS_AS(validate(neg), ConfigError);
  AnalysisConfig zero_seeds;
  zero_seeds.ensemble = 0;
  CHECK_THROWS_AS(validate(zero_seeds), ConfigError);
  AnalysisConfig gaps;
  gaps.drop_session_gaps = true;
  CHECK_THROWS_AS(validate(gaps), ConfigError);
}

TEST_CASE("environment overrides the output directory") {
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  std::istringstream in("out=elsewhere\n");
  const auto c = parse_config(in);
  ::unsetenv(kOutputDirEnv);
  CHECK(c.output_dir == "/tmp/from-env");
}

TEST_CASE("config file inputs resolve against the file location") {
  const auto dir = std::filesystem::temp_directory_path() / "retint-test-config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "input=data/a.csv\ninput=/abs/b.csv\n";
  }
  const auto c = load_config(dir / "run.cfg");
  REQUIRE(c.inputs.size() == 2);
  CHECK(c.inputs[0] == dir / "data/a.csv");
  CHECK(c.inputs[1] == "/abs/b.csv");
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("TSV writers use the documented headers") {
  const auto seq = make_sequence(1.5, {3, 2}, 6);
  std::ostringstream a;
  write_intervals_tsv(a, seq);
  CHECK(a.str() == "q\tinterval\n1.5\t3\n1.5\t2\n");

  ScaledPDF pdf;
  pdf.q = 2;
  pdf.x = {1.0};
  pdf.y = {0.5};
  std::ostringstream b;
  write_scaled_pdf_tsv(b, pdf);
  CHECK(b.str() == "q\tx\ty\n2\t1\t0.5\n");

  ClusterRuns runs;
  runs.above_sizes = {1, 2};
  runs.below_sizes = {1};
  std::ostringstream c;
  write_cluster_survival_tsv(c, runs);
  CHECK(c.str() == "side\tk\tsurvival\nabove\t1\t1\nabove\t2\t0.5\nbelow\t1\t1\n");
}

TEST_CASE("distance matrix JSON") {
  const std::vector<double> qs{1, 2};
  const DistanceMatrix d{{0, 0.25}, {0.25, 0}};
  const auto j = distance_matrix_json(qs, d);
  CHECK(j["q"].size() == 2);
  CHECK(j["ks_distance"][0][1].get<double>() == 0.25);
}

TEST_CASE("atomic file emission replaces content") {
  const auto dir = std::filesystem::temp_directory_path() / "retint-test-atomic";
  std::filesystem::remove_all(dir);
  write_file_atomic(dir / "sub" / "f.txt", "one");
  write_file_atomic(dir / "sub" / "f.txt", "two");
  std::ifstream in(dir / "sub" / "f.txt");
  std::string s((std::istreambuf_iterator<char>(in)), {});
  CHECK(s == "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto &e : std::filesystem::directory_iterator(dir / "sub"))
    ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
