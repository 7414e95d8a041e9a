// Command-line front end: analyze, intervals, pdf, conditional, clusters,
// synth, split.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retint/retint.hpp"

namespace fs = std::filesystem;
using namespace retint;

namespace {

/// Options shared by the analysis subcommands. Flags given on the command
/// line win over the config file.
struct CommonOptions {
  std::vector<std::string> inputs;
  std::string config_path;
  std::vector<double> qs;
  std::optional<std::size_t> bins;
  bool log_bins = false;
  bool linear_bins = false;
  std::optional<std::size_t> subsets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> ensemble;
  std::string split_date;
  bool drop_session_gaps = false;
  std::string session_open, session_close;
  std::optional<std::size_t> slot_seconds;
  std::optional<std::size_t> workers;
  std::string out;
};

void add_common(CLI::App *cmd, CommonOptions &o, bool many_inputs) {
  if (many_inputs)
    cmd->add_option("inputs", o.inputs, "Price CSV files (timestamp,price)");
  else
    cmd->add_option("input", o.inputs, "Price CSV file (timestamp,price)")->required()->expected(1);
  cmd->add_option("--config", o.config_path, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--q", o.qs, "Volatility threshold (repeatable)")->allow_extra_args(false);
  cmd->add_option("--bins", o.bins, "Histogram bin count");
  cmd->add_flag("--log-bins", o.log_bins, "Logarithmic bins (default)");
  cmd->add_flag("--linear-bins", o.linear_bins, "Linear bins");
  cmd->add_option("--subsets", o.subsets, "Conditioning subsets (default 8)");
  cmd->add_option("--seed", o.seed, "Base seed for surrogates");
  cmd->add_option("--ensemble", o.ensemble, "Surrogate ensemble size (default 100)");
  cmd->add_flag("--drop-session-gaps", o.drop_session_gaps,
                "Drop intervals spanning session boundaries (needs a session calendar)");
  cmd->add_option("--session-open", o.session_open, "Session open HH:MM (enables detrending)");
  cmd->add_option("--session-close", o.session_close, "Session close HH:MM");
  cmd->add_option("--slot-seconds", o.slot_seconds, "Intraday slot width in seconds");
  cmd->add_option("--workers", o.workers, "Worker threads (0: hardware)");
  cmd->add_option("--out", o.out, "Output directory");
}

AnalysisConfig build_config(const CommonOptions &o) {
  AnalysisConfig c = o.config_path.empty() ? AnalysisConfig{} : load_config(o.config_path);
  if (o.config_path.empty())
    if (const char *env = std::getenv(kOutputDirEnv); env && *env)
      c.output_dir = env;
  for (const auto &in : o.inputs)
    c.inputs.emplace_back(in);
  if (!o.qs.empty())
    c.thresholds = o.qs;
  if (o.bins)
    c.bins = *o.bins;
  if (o.log_bins && o.linear_bins)
    throw ConfigError("--log-bins and --linear-bins are mutually exclusive");
  if (o.log_bins)
    c.binning = BinningMode::logarithmic;
  if (o.linear_bins)
    c.binning = BinningMode::linear;
  if (o.subsets)
    c.n_subsets = *o.subsets;
  if (o.seed)
    c.seed = *o.seed;
  if (o.ensemble)
    c.ensemble = *o.ensemble;
  bool unused = false;
  if (!o.split_date.empty())
    apply_setting(c, "split_date", o.split_date, 0, unused);
  if (!o.session_open.empty())
    apply_setting(c, "session_open", o.session_open, 0, unused);
  if (!o.session_close.empty())
    apply_setting(c, "session_close", o.session_close, 0, unused);
  if (o.slot_seconds)
    apply_setting(c, "slot_seconds", std::to_string(*o.slot_seconds), 0, unused);
  if (o.drop_session_gaps)
    c.drop_session_gaps = true;
  if (o.workers)
    c.workers = *o.workers;
  if (!o.out.empty())
    c.output_dir = o.out;
  validate(c);
  return c;
}

/// Prepared volatility of a single input, following the pipeline steps.
struct Loaded {
  std::string id;
  VolatilitySeries vol;
  std::vector<std::int64_t> session_of;
};

Loaded load(const AnalysisConfig &c) {
  if (c.inputs.size() != 1)
    throw ConfigError("exactly one input file is required");
  std::vector<std::string> warnings;
  PriceSeries series = ingest_csv(c.inputs.front(), &warnings);
  for (const auto &w : warnings)
    std::cerr << "warning: " << w << '\n';
  Loaded out;
  out.id = series.instrument_id;
  out.vol = normalize_volatility(log_returns(series));
  if (c.calendar) {
    const auto slots = assign_slots(out.vol.timestamps, *c.calendar);
    out.vol = intraday_detrend(out.vol, build_intraday_pattern(out.vol, slots), slots);
    out.session_of = slots.session;
  }
  return out;
}

std::vector<IntervalSequence> sequences(const Loaded &l, const AnalysisConfig &c) {
  ExtractOptions opt;
  if (c.drop_session_gaps)
    opt.session_of = l.session_of;
  std::vector<IntervalSequence> out;
  for (double q : c.thresholds) {
    try {
      out.push_back(extract_intervals(l.vol, q, opt));
    } catch (const Error &e) {
      throw Error("q=" + format_double(q) + ": " + e.what());
    }
  }
  return out;
}

/// Sends TSV either to a file under the output directory (when --out or a
/// config/env directory was chosen explicitly) or to stdout. Rows carry q,
/// so concatenated tables keep a single header.
class TsvSink {
public:
  explicit TsvSink(std::optional<fs::path> dir) : dir_(std::move(dir)) {}

  template <typename Fn> void put(const std::string &file, Fn &&fn) {
    if (dir_) {
      emit_file(*dir_ / file, fn);
      return;
    }
    std::ostringstream buf;
    fn(buf);
    std::string s = buf.str();
    if (header_done_) {
      const auto nl = s.find('\n');
      s.erase(0, nl == std::string::npos ? s.size() : nl + 1);
    }
    header_done_ = true;
    std::cout << s;
  }

  void json(const std::string &file, const Json &j) {
    if (dir_)
      emit_json(*dir_ / file, j);
    else
      std::cerr << j.dump() << '\n';
  }

private:
  std::optional<fs::path> dir_;
  bool header_done_ = false;
};

std::optional<fs::path> sink_dir(const CommonOptions &o) {
  if (!o.out.empty())
    return fs::path(o.out);
  if (const char *env = std::getenv(kOutputDirEnv); env && *env)
    return fs::path(env);
  return std::nullopt;
}

int report_error(const std::string &kind, const std::string &message, int code) {
  Json j;
  j["error"]["type"] = kind;
  j["error"]["message"] = message;
  std::cerr << j.dump() << '\n';
  return code;
}

// --- subcommands ------------------------------------------------------------

int cmd_analyze(const CommonOptions &o) {
  const AnalysisConfig c = build_config(o);
  const PipelineReport r = run_pipeline(c);
  std::cout << "wrote " << c.output_dir.string() << "/summary.json";
  if (!r.errors.empty())
    std::cout << " (" << r.errors.size() << " unit error(s), see errors.json)";
  std::cout << '\n';
  for (const auto &e : r.errors)
    std::cerr << to_json(e).dump() << '\n';
  return r.exit_code();
}

int cmd_intervals(const CommonOptions &o) {
  const AnalysisConfig c = build_config(o);
  const auto seqs = sequences(load(c), c);
  TsvSink sink(sink_dir(o));
  Json summary = Json::array();
  for (const auto &s : seqs) {
    sink.put("intervals_" + q_tag(s.threshold_q) + ".tsv",
             [&](std::ostream &out) { write_intervals_tsv(out, s); });
    summary.push_back({{"q", s.threshold_q}, {"count", s.size()}, {"mean_interval", s.mean_interval}});
  }
  sink.json("intervals.json", summary);
  return 0;
}

int cmd_pdf(const CommonOptions &o) {
  const AnalysisConfig c = build_config(o);
  const auto seqs = sequences(load(c), c);
  TsvSink sink(sink_dir(o));
  Json summary = Json::array();
  for (const auto &s : seqs) {
    const BinnedPDF pdf = pdf_estimate(s, c.binning, c.bins);
    if (!pdf.warning.empty())
      std::cerr << "warning: q=" << format_double(s.threshold_q) << ": " << pdf.warning << '\n';
    sink.put("pdf_" + q_tag(s.threshold_q) + ".tsv",
             [&](std::ostream &out) { write_scaled_pdf_tsv(out, scale_pdf(pdf, s)); });
    summary.push_back({{"q", s.threshold_q},
                       {"mean_interval", s.mean_interval},
                       {"poisson_ks", poisson_deviation(s)}});
  }
  Json j;
  j["thresholds"] = summary;
  if (seqs.size() >= 2)
    j["collapse"] = distance_matrix_json(c.thresholds, collapse_distance(std::span<const IntervalSequence>(seqs)));
  sink.json("collapse.json", j);
  return 0;
}

int cmd_conditional(const CommonOptions &o) {
  const AnalysisConfig c = build_config(o);
  const auto seqs = sequences(load(c), c);
  const auto dir = sink_dir(o);
  TsvSink pdfs(dir);
  std::vector<ConditionalMeanCurve> curves, shuffled;
  for (const auto &s : seqs) {
    const auto cond = conditional_pdfs(s, c.n_subsets, c.binning, c.bins);
    pdfs.put("conditional_pdf_" + q_tag(s.threshold_q) + ".tsv",
             [&](std::ostream &out) { write_conditional_pdf_tsv(out, cond); });
    curves.push_back(conditional_mean_curve(s, c.n_subsets));
    shuffled.push_back(conditional_mean_curve(shuffle_intervals(s, derive_seed(c.seed, hash_name(format_double(s.threshold_q)))),
                                              c.n_subsets));
  }
  // Mean curves go to files, or to stdout after a blank line.
  if (!dir)
    std::cout << '\n';
  TsvSink means(dir);
  for (std::size_t i = 0; i < seqs.size(); ++i)
    means.put("conditional_mean_" + q_tag(seqs[i].threshold_q) + ".tsv",
              [&](std::ostream &out) { write_conditional_mean_tsv(out, curves[i]); });
  if (dir) {
    for (std::size_t i = 0; i < seqs.size(); ++i)
      emit_file(*dir / ("conditional_mean_shuffled_" + q_tag(seqs[i].threshold_q) + ".tsv"),
                [&](std::ostream &out) { write_conditional_mean_tsv(out, shuffled[i]); });
  }
  return 0;
}

int cmd_clusters(const CommonOptions &o) {
  const AnalysisConfig c = build_config(o);
  const Loaded l = load(c);
  const auto seqs = sequences(l, c);
  const auto dir = sink_dir(o);
  TsvSink sink(dir);
  ExtractOptions opt;
  if (c.drop_session_gaps)
    opt.session_of = l.session_of;
  for (const auto &s : seqs) {
    const ClusterRuns runs = cluster_runs(s);
    sink.put("clusters_" + q_tag(s.threshold_q) + ".tsv",
             [&](std::ostream &out) { write_cluster_survival_tsv(out, runs); });
    if (!dir)
      continue;
    std::size_t k_max = 10;
    for (const auto *sizes : {&runs.above_sizes, &runs.below_sizes})
      for (std::size_t n : *sizes)
        k_max = std::max(k_max, n);
    std::vector<std::vector<SurvivalPoint>> above, below;
    for (std::size_t e = 0; e < c.ensemble; ++e) {
      const auto sur = shuffle_volatility(l.vol, detail::unit_seed(c.seed, l.id, "volatility-shuffle", std::nan(""), e));
      const auto sruns = cluster_runs(extract_intervals(sur, s.threshold_q, opt));
      if (!sruns.above_sizes.empty())
        above.push_back(cluster_survival(sruns, Label::above));
      if (!sruns.below_sizes.empty())
        below.push_back(cluster_survival(sruns, Label::below));
    }
    emit_file(*dir / ("clusters_surrogate_" + q_tag(s.threshold_q) + ".tsv"), [&](std::ostream &out) {
      write_envelope_tsv(out, survival_envelope(above, k_max), survival_envelope(below, k_max));
    });
  }
  return 0;
}

struct SynthOptions {
  std::string kind = "longrange";
  std::size_t n = 1 << 16;
  double gamma = 0.3;
  std::uint64_t seed = 1;
  std::string start = "1984-01-01";
  std::int64_t step = 86400;
  std::vector<double> pattern;
  std::string id = "synthetic";
  std::string out;
};

int cmd_synth(const SynthOptions &o) {
  GeneratorSpec spec;
  if (o.kind == "iid")
    spec.kind = GeneratorKind::iid_gaussian;
  else if (o.kind == "longrange")
    spec.kind = GeneratorKind::longrange_correlated;
  else
    throw ParameterError("unknown generator kind '" + o.kind + "' (iid or longrange)");
  spec.length = o.n;
  spec.gamma = o.gamma;
  spec.seed = o.seed;
  const auto start = parse_timestamp(o.start);
  if (!start)
    throw ParameterError("invalid start timestamp '" + o.start + "'");
  spec.start = *start;
  spec.step = Duration{o.step};
  spec.intraday_pattern = o.pattern;
  const PriceSeries prices = prices_from_returns(generate_returns(spec), spec, o.id);
  if (o.out.empty()) {
    write_csv(std::cout, prices);
  } else {
    emit_file(o.out, [&](std::ostream &out) { write_csv(out, prices); });
  }
  return 0;
}

int cmd_split(const std::string &input, const std::string &date, const std::string &out_dir) {
  std::vector<std::string> warnings;
  const PriceSeries series = ingest_csv(fs::path(input), &warnings);
  for (const auto &w : warnings)
    std::cerr << "warning: " << w << '\n';
  Timestamp cut = default_split_date();
  if (!date.empty()) {
    const auto t = parse_timestamp(date);
    if (!t)
      throw ParameterError("invalid split date '" + date + "'");
    cut = *t;
  }
  const auto [pre, post] = split_by_date(series, cut);
  fs::path dir = out_dir;
  if (dir.empty())
    if (const char *env = std::getenv(kOutputDirEnv); env && *env)
      dir = env;
  if (dir.empty())
    dir = fs::path(input).parent_path();
  for (const PriceSeries *part : {&pre, &post}) {
    const fs::path path = dir / (part->instrument_id + ".csv");
    emit_file(path, [&](std::ostream &out) { write_csv(out, *part); });
    std::cout << path.string() << '\t' << part->size() << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Volatility return-interval analysis"};
  app.require_subcommand(1);

  CommonOptions analyze_o, intervals_o, pdf_o, conditional_o, clusters_o;
  auto *analyze = app.add_subcommand("analyze", "Run the full pipeline over one or more inputs");
  add_common(analyze, analyze_o, true);
  analyze->add_option("--split-date", analyze_o.split_date,
                      "Analyze periods before/after a date (YYYY-MM-DD, 'default' = 1990-01-01)");
  auto *intervals = app.add_subcommand("intervals", "Return intervals per threshold");
  add_common(intervals, intervals_o, false);
  auto *pdf = app.add_subcommand("pdf", "Scaled interval densities and collapse distances");
  add_common(pdf, pdf_o, false);
  auto *conditional = app.add_subcommand("conditional", "Conditional densities and mean curves");
  add_common(conditional, conditional_o, false);
  auto *clusters = app.add_subcommand("clusters", "Median-split cluster survival and surrogates");
  add_common(clusters, clusters_o, false);

  SynthOptions synth_o;
  auto *synth = app.add_subcommand("synth", "Generate a synthetic price CSV");
  synth->add_option("--kind", synth_o.kind, "iid or longrange")->capture_default_str();
  synth->add_option("--n", synth_o.n, "Number of returns")->capture_default_str();
  synth->add_option("--gamma", synth_o.gamma, "Correlation exponent in (0,1)")->capture_default_str();
  synth->add_option("--seed", synth_o.seed, "Seed")->capture_default_str();
  synth->add_option("--start", synth_o.start, "First timestamp")->capture_default_str();
  synth->add_option("--step", synth_o.step, "Sampling step in seconds")->capture_default_str();
  synth->add_option("--pattern", synth_o.pattern, "Intraday levels, one per sample of a day")->delimiter(',');
  synth->add_option("--id", synth_o.id, "Instrument id")->capture_default_str();
  synth->add_option("--out", synth_o.out, "Output CSV (stdout if omitted)");

  std::string split_input, split_date, split_out;
  auto *split = app.add_subcommand("split", "Split a price CSV at a date");
  split->add_option("input", split_input, "Price CSV file")->required();
  split->add_option("--split-date", split_date, "Cut date (default 1990-01-01)");
  split->add_option("--out", split_out, "Output directory (default: next to the input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*analyze)
      return cmd_analyze(analyze_o);
    if (*intervals)
      return cmd_intervals(intervals_o);
    if (*pdf)
      return cmd_pdf(pdf_o);
    if (*conditional)
      return cmd_conditional(conditional_o);
    if (*clusters)
      return cmd_clusters(clusters_o);
    if (*synth)
      return cmd_synth(synth_o);
    if (*split)
      return cmd_split(split_input, split_date, split_out);
  } catch (const ConfigError &e) {
    return report_error("config", e.what(), 1);
  } catch (const ParseError &e) {
    return report_error("parse", e.what(), 1);
  } catch (const ParameterError &e) {
    return report_error("parameter", e.what(), 1);
  } catch (const IoError &e) {
    return report_error("io", e.what(), 1);
  } catch (const std::exception &e) {
    return report_error("error", e.what(), 1);
  }
  return 1;
}
