#ifndef RETINT_PIPELINE_HPP
#define RETINT_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "retint/clusters.hpp"
#include "retint/config.hpp"
#include "retint/csv.hpp"
#include "retint/distribution.hpp"
#include "retint/intervals.hpp"
#include "retint/ks.hpp"
#include "retint/memory.hpp"
#include "retint/output.hpp"
#include "retint/random.hpp"
#include "retint/series.hpp"

namespace retint {

/// A failure attributed to the unit of work that raised it.
struct UnitError {
  std::string instrument;
  std::optional<double> q;
  std::string stage;
  std::string message;
};

struct PipelineReport {
  Json summary;
  std::vector<UnitError> errors;
  std::vector<std::string> warnings;

  int exit_code() const { return errors.empty() ? 0 : 2; }
};

inline Json to_json(const UnitError &e) {
  Json j;
  j["instrument"] = e.instrument;
  j["q"] = e.q ? Json(*e.q) : Json(nullptr);
  j["stage"] = e.stage;
  j["message"] = e.message;
  return j;
}

/// Runs `tasks` on at most `workers` threads (0: hardware concurrency).
inline void run_bounded(std::vector<std::function<void()>> &tasks, std::size_t workers) {
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks.size());
  if (workers <= 1) {
    for (auto &t : tasks)
      t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++)
        tasks[i]();
    });
  for (auto &t : pool)
    t.join();
}

/// File-name tag of a threshold, e.g. `q1.5`.
inline std::string q_tag(double q) { return "q" + format_double(q); }

namespace detail {

struct Dataset {
  std::string id;     ///< instrument, plus `/pre` or `/post` in split mode
  std::string period; ///< empty, "pre" or "post"
  std::filesystem::path dir;
  VolatilitySeries vol;
  std::vector<std::int64_t> session_of;
  std::size_t gap_count = 0;
  std::int64_t missing_steps = 0;
};

struct UnitResult {
  bool ok = false;
  IntervalSequence seq;
  Json stats;
};

/// Per-unit stream seed: depends on the dataset, the stream and the draw,
/// never on which other thresholds are configured.
inline std::uint64_t unit_seed(std::uint64_t base, const std::string &dataset,
                               std::string_view stream, double q, std::size_t draw) {
  std::uint64_t key = hash_name(dataset) ^ splitmix64(hash_name(stream));
  if (!std::isnan(q))
    key ^= splitmix64(hash_name(format_double(q)) + 1);
  return derive_seed(derive_seed(base, key), draw);
}

inline Json curve_json(const ConditionalMeanCurve &c) {
  Json j;
  j["lowest_mean"] = c.means.front();
  j["lowest_stderr"] = c.standard_errors.front();
  j["highest_mean"] = c.means.back();
  j["highest_stderr"] = c.standard_errors.back();
  return j;
}

inline Json analyze_unit(const Dataset &ds, double q, const AnalysisConfig &config,
                         IntervalSequence &seq_out, std::string &stage) {
  namespace fs = std::filesystem;
  const std::string tag = q_tag(q);
  ExtractOptions opts;
  if (config.drop_session_gaps)
    opts.session_of = ds.session_of;

  stage = "intervals";
  IntervalSequence seq = extract_intervals(ds.vol, q, opts);
  emit_file(ds.dir / ("intervals_" + tag + ".tsv"), [&](auto &o) { write_intervals_tsv(o, seq); });

  stage = "pdf";
  const BinnedPDF pdf = pdf_estimate(seq, config.binning, config.bins);
  emit_file(ds.dir / ("pdf_" + tag + ".tsv"),
            [&](auto &o) { write_scaled_pdf_tsv(o, scale_pdf(pdf, seq)); });

  Json stats;
  stats["q"] = q;
  stats["count"] = seq.size();
  stats["mean_interval"] = seq.mean_interval;
  stats["event_probability"] = event_probability(seq);
  stats["poisson_ks"] = poisson_deviation(seq);
  stats["geometric_ks"] = geometric_deviation(seq);
  if (!pdf.warning.empty())
    stats["pdf_warning"] = pdf.warning;

  stage = "conditional_pdf";
  const auto cond = conditional_pdfs(seq, config.n_subsets, config.binning, config.bins);
  for (const auto &c : cond)
    emit_file(ds.dir / ("conditional_pdf_" + tag + "_k" + std::to_string(c.subset_index) + ".tsv"),
              [&](auto &o) { write_conditional_pdf_tsv(o, std::span<const ConditionalPDF>(&c, 1)); });
  {
    const auto &lo = cond.front().sample;
    const auto &hi = cond.back().sample;
    Json j;
    j["ks_lowest_vs_highest"] = ks_two_sample(lo, hi);
    j["ks_critical_1pct"] = ks_critical_value(0.01, lo.size(), hi.size());
    stats["conditional_pdf"] = j;
  }

  stage = "conditional_mean";
  const auto curve = conditional_mean_curve(seq, config.n_subsets);
  emit_file(ds.dir / ("conditional_mean_" + tag + ".tsv"),
            [&](auto &o) { write_conditional_mean_tsv(o, curve); });
  const auto shuffled =
      shuffle_intervals(seq, unit_seed(config.seed, ds.id, "interval-shuffle", q, 0));
  const auto shuffled_curve = conditional_mean_curve(shuffled, config.n_subsets);
  emit_file(ds.dir / ("conditional_mean_shuffled_" + tag + ".tsv"),
            [&](auto &o) { write_conditional_mean_tsv(o, shuffled_curve); });
  stats["conditional_mean"] = curve_json(curve);
  stats["conditional_mean_shuffled"] = curve_json(shuffled_curve);

  stage = "clusters";
  const ClusterRuns runs = cluster_runs(seq);
  emit_file(ds.dir / ("clusters_" + tag + ".tsv"),
            [&](auto &o) { write_cluster_survival_tsv(o, runs); });
  stats["median"] = runs.median;
  stats["above_clusters"] = runs.above_sizes.size();
  stats["below_clusters"] = runs.below_sizes.size();

  stage = "surrogate";
  std::size_t k_max = 10;
  for (const auto &sizes : {runs.above_sizes, runs.below_sizes})
    for (std::size_t s : sizes)
      k_max = std::max(k_max, s);
  std::vector<std::vector<SurvivalPoint>> above, below;
  for (std::size_t s = 0; s < config.ensemble; ++s) {
    // volatility shuffles are shared across thresholds of the same dataset
    const auto surrogate = shuffle_volatility(
        ds.vol, unit_seed(config.seed, ds.id, "volatility-shuffle", std::nan(""), s));
    const auto sseq = extract_intervals(surrogate, q, opts);
    const auto sruns = cluster_runs(sseq);
    if (!sruns.above_sizes.empty())
      above.push_back(cluster_survival(sruns, Label::above));
    if (!sruns.below_sizes.empty())
      below.push_back(cluster_survival(sruns, Label::below));
  }
  emit_file(ds.dir / ("clusters_surrogate_" + tag + ".tsv"), [&](auto &o) {
    write_envelope_tsv(o, survival_envelope(above, k_max), survival_envelope(below, k_max));
  });
  stats["surrogate_seeds"] = config.ensemble;

  seq_out = std::move(seq);
  return stats;
}

inline std::string unique_id(std::string id, std::set<std::string> &taken) {
  if (id.empty())
    id = "series";
  std::string candidate = id;
  for (int n = 2; taken.count(candidate); ++n)
    candidate = id + "_" + std::to_string(n);
  taken.insert(candidate);
  return candidate;
}

/// Pooled statistics of several instruments over one period.
inline Json analyze_mixture(const std::vector<const Dataset *> &members,
                            const std::vector<std::vector<UnitResult>> &units,
                            const std::vector<std::size_t> &member_index,
                            const AnalysisConfig &config, const std::filesystem::path &dir,
                            std::vector<UnitError> &errors, const std::string &label) {
  Json out;
  out["members"] = Json::array();
  for (const Dataset *d : members)
    out["members"].push_back(d->id);
  Json per_q = Json::array();
  std::vector<double> ok_qs;
  std::vector<std::vector<double>> pooled_samples;
  for (std::size_t qi = 0; qi < config.thresholds.size(); ++qi) {
    const double q = config.thresholds[qi];
    const std::string tag = q_tag(q);
    std::vector<IntervalSequence> seqs;
    for (std::size_t m : member_index)
      if (units[m][qi].ok)
        seqs.push_back(units[m][qi].seq);
    if (seqs.size() < 2)
      continue;
    std::string stage = "mixture_pdf";
    try {
      auto pooled = pool_scaled(seqs);
      const BinnedPDF pdf = pdf_estimate(std::span<const double>(pooled), config.binning, config.bins);
      emit_file(dir / ("pdf_" + tag + ".tsv"),
                [&](auto &o) { write_scaled_pdf_tsv(o, scale_pdf(pdf, 1.0, q)); });

      stage = "mixture_conditional_mean";
      const auto curve = conditional_mean_curve(std::span<const IntervalSequence>(seqs), config.n_subsets);
      emit_file(dir / ("conditional_mean_" + tag + ".tsv"),
                [&](auto &o) { write_conditional_mean_tsv(o, curve); });

      stage = "mixture_clusters";
      ClusterRuns merged;
      merged.q = q;
      const double pooled_median =
          config.pooled_median ? median_of<double>(pooled) : std::nan("");
      for (const auto &s : seqs) {
        const auto r = cluster_runs(s, config.pooled_median ? pooled_median * s.mean_interval
                                                            : std::nan(""));
        merged.above_sizes.insert(merged.above_sizes.end(), r.above_sizes.begin(), r.above_sizes.end());
        merged.below_sizes.insert(merged.below_sizes.end(), r.below_sizes.begin(), r.below_sizes.end());
      }
      emit_file(dir / ("clusters_" + tag + ".tsv"),
                [&](auto &o) { write_cluster_survival_tsv(o, merged); });

      Json j;
      j["q"] = q;
      j["members"] = seqs.size();
      j["count"] = pooled.size();
      j["poisson_ks"] = poisson_deviation(std::span<const double>(pooled));
      j["conditional_mean"] = curve_json(curve);
      per_q.push_back(j);
      ok_qs.push_back(q);
      pooled_samples.push_back(std::move(pooled));
    } catch (const std::exception &e) {
      errors.push_back({label, q, stage, e.what()});
    }
  }
  out["thresholds"] = per_q;
  if (pooled_samples.size() >= 2) {
    const auto d = collapse_distance(std::span<const std::vector<double>>(pooled_samples));
    emit_json(dir / "collapse.json", distance_matrix_json(ok_qs, d));
    out["collapse"] = distance_matrix_json(ok_qs, d);
  }
  emit_json(dir / "summary.json", out);
  return out;
}

} // namespace detail

/// Runs every analysis for every instrument (and period) and threshold,
/// writing plot-ready files under config.output_dir. Failures are recorded
/// per (instrument, q, stage) and the remaining units still run.
inline PipelineReport run_pipeline(AnalysisConfig config) {
  namespace fs = std::filesystem;
  validate(config);
  if (config.inputs.empty())
    throw ConfigError("no input files given");

  PipelineReport report;
  std::vector<detail::Dataset> datasets;
  std::set<std::string> taken;

  auto prepare = [&](PriceSeries series, const std::string &id, const std::string &period) {
    detail::Dataset ds;
    ds.id = period.empty() ? id : id + "/" + period;
    ds.period = period;
    ds.dir = config.output_dir / id;
    if (!period.empty())
      ds.dir /= period;
    std::string stage = "returns";
    try {
      const ReturnSeries returns = log_returns(series);
      ds.gap_count = returns.gaps.size();
      for (const auto &g : returns.gaps)
        ds.missing_steps += g.missing_steps;
      stage = "volatility";
      ds.vol = normalize_volatility(returns);
      if (config.calendar) {
        stage = "detrend";
        const SlotAssignment slots = assign_slots(ds.vol.timestamps, *config.calendar);
        const IntradayPattern pattern = build_intraday_pattern(ds.vol, slots);
        ds.vol = intraday_detrend(ds.vol, pattern, slots);
        ds.session_of = slots.session;
      }
      datasets.push_back(std::move(ds));
    } catch (const std::exception &e) {
      report.errors.push_back({ds.id, std::nullopt, stage, e.what()});
    }
  };

  for (const auto &path : config.inputs) {
    std::string id = detail::unique_id(path.stem().string(), taken);
    PriceSeries series;
    try {
      series = ingest_csv(path, &report.warnings);
      series.instrument_id = id;
    } catch (const std::exception &e) {
      report.errors.push_back({id, std::nullopt, "ingest", e.what()});
      continue;
    }
    if (config.split_date) {
      try {
        auto [pre, post] = split_by_date(series, *config.split_date);
        prepare(std::move(pre), id, "pre");
        prepare(std::move(post), id, "post");
      } catch (const std::exception &e) {
        report.errors.push_back({id, std::nullopt, "split", e.what()});
      }
    } else {
      prepare(std::move(series), id, "");
    }
  }

  const std::size_t nq = config.thresholds.size();
  std::vector<std::vector<detail::UnitResult>> units(datasets.size(),
                                                     std::vector<detail::UnitResult>(nq));
  std::vector<std::optional<UnitError>> unit_errors(datasets.size() * nq);
  std::vector<std::function<void()>> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t qi = 0; qi < nq; ++qi)
      tasks.emplace_back([&, d, qi] {
        std::string stage = "intervals";
        const double q = config.thresholds[qi];
        try {
          units[d][qi].stats = detail::analyze_unit(datasets[d], q, config, units[d][qi].seq, stage);
          units[d][qi].ok = true;
        } catch (const std::exception &e) {
          unit_errors[d * nq + qi] = UnitError{datasets[d].id, q, stage, e.what()};
        }
      });
  run_bounded(tasks, config.workers);
  for (auto &e : unit_errors)
    if (e)
      report.errors.push_back(std::move(*e));

  Json ds_summaries = Json::array();
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto &ds = datasets[d];
    Json j;
    j["id"] = ds.id;
    j["observations"] = ds.vol.size();
    j["detrended"] = ds.vol.detrended;
    j["gaps"] = ds.gap_count;
    j["missing_steps"] = ds.missing_steps;
    Json per_q = Json::array();
    std::vector<double> ok_qs;
    std::vector<IntervalSequence> ok_seqs;
    for (std::size_t qi = 0; qi < nq; ++qi) {
      if (!units[d][qi].ok)
        continue;
      per_q.push_back(units[d][qi].stats);
      ok_qs.push_back(config.thresholds[qi]);
      ok_seqs.push_back(units[d][qi].seq);
    }
    j["thresholds"] = per_q;
    if (ok_seqs.size() >= 2) {
      const auto dist = collapse_distance(std::span<const IntervalSequence>(ok_seqs));
      j["collapse"] = distance_matrix_json(ok_qs, dist);
      try {
        emit_json(ds.dir / "collapse.json", j["collapse"]);
      } catch (const std::exception &e) {
        report.errors.push_back({ds.id, std::nullopt, "collapse", e.what()});
      }
    }
    try {
      emit_json(ds.dir / "summary.json", j);
    } catch (const std::exception &e) {
      report.errors.push_back({ds.id, std::nullopt, "summary", e.what()});
    }
    ds_summaries.push_back(std::move(j));
  }

  // instruments pooled per period
  Json mixtures = Json::array();
  std::map<std::string, std::vector<std::size_t>> by_period;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    by_period[datasets[d].period].push_back(d);
  for (const auto &[period, members] : by_period) {
    if (members.size() < 2)
      continue;
    std::vector<const detail::Dataset *> ptrs;
    for (std::size_t m : members)
      ptrs.push_back(&datasets[m]);
    fs::path dir = config.output_dir / "mixture";
    std::string label = "mixture";
    if (!period.empty()) {
      dir /= period;
      label += "/" + period;
    }
    Json mj = detail::analyze_mixture(ptrs, units, members, config, dir, report.errors, label);
    mj["id"] = label;
    mixtures.push_back(std::move(mj));
  }

  Json cfg;
  cfg["thresholds"] = config.thresholds;
  cfg["binning"] = config.binning == BinningMode::logarithmic ? "logarithmic" : "linear";
  cfg["bins"] = config.bins;
  cfg["subsets"] = config.n_subsets;
  cfg["seed"] = config.seed;
  cfg["ensemble"] = config.ensemble;
  cfg["detrend"] = config.calendar.has_value();
  cfg["drop_session_gaps"] = config.drop_session_gaps;
  cfg["split_date"] = config.split_date ? Json(format_timestamp(*config.split_date)) : Json(nullptr);
  cfg["pooled_median"] = config.pooled_median;

  Json errors = Json::array();
  for (const auto &e : report.errors)
    errors.push_back(to_json(e));

  report.summary["config"] = cfg;
  report.summary["datasets"] = ds_summaries;
  report.summary["mixtures"] = mixtures;
  report.summary["warnings"] = report.warnings;
  report.summary["errors"] = errors;
  emit_json(config.output_dir / "summary.json", report.summary);
  emit_json(config.output_dir / "errors.json", errors);
  return report;
}

} // namespace retint

#endif // RETINT_PIPELINE_HPP
