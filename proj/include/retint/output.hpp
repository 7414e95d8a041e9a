#ifndef RETINT_OUTPUT_HPP
#define RETINT_OUTPUT_HPP

#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>

#include "json.hpp"
#include "retint/clusters.hpp"
#include "retint/csv.hpp"
#include "retint/distribution.hpp"
#include "retint/error.hpp"
#include "retint/intervals.hpp"
#include "retint/memory.hpp"

// Plot-ready emitters. Every TSV starts with a header row; numbers use the
// shortest round-trip decimal form so that output bytes depend only on the
// values.

namespace retint {

using Json = nlohmann::ordered_json;

inline void write_intervals_tsv(std::ostream &out, const IntervalSequence &seq) {
  out << "q\tinterval\n";
  const std::string q = format_double(seq.threshold_q);
  for (Interval t : seq.intervals)
    out << q << '\t' << t << '\n';
}

inline void write_scaled_pdf_tsv(std::ostream &out, const ScaledPDF &pdf) {
  out << "q\tx\ty\n";
  const std::string q = format_double(pdf.q);
  for (std::size_t i = 0; i < pdf.x.size(); ++i)
    out << q << '\t' << format_double(pdf.x[i]) << '\t' << format_double(pdf.y[i]) << '\n';
}

inline void write_conditional_pdf_tsv(std::ostream &out, std::span<const ConditionalPDF> pdfs) {
  out << "q\tk\tx\ty\n";
  for (const auto &c : pdfs) {
    const std::string q = format_double(c.q);
    for (std::size_t i = 0; i < c.scaled_points.x.size(); ++i)
      out << q << '\t' << c.subset_index << '\t' << format_double(c.scaled_points.x[i]) << '\t'
          << format_double(c.scaled_points.y[i]) << '\n';
  }
}

inline void write_conditional_mean_tsv(std::ostream &out, const ConditionalMeanCurve &curve) {
  out << "q\tx\tmean\tstderr\tcount\n";
  const std::string q = format_double(curve.q);
  for (std::size_t b = 0; b < curve.bins(); ++b)
    out << q << '\t' << format_double(curve.bin_centers[b]) << '\t' << format_double(curve.means[b])
        << '\t' << format_double(curve.standard_errors[b]) << '\t' << curve.counts[b] << '\n';
}

inline const char *side_name(Label side) { return side == Label::above ? "above" : "below"; }

inline void write_cluster_survival_tsv(std::ostream &out, const ClusterRuns &runs) {
  out << "side\tk\tsurvival\n";
  for (Label side : {Label::above, Label::below}) {
    if (runs.sizes(side).empty())
      continue;
    for (const auto &p : cluster_survival(runs, side))
      out << side_name(side) << '\t' << p.k << '\t' << format_double(p.survival) << '\n';
  }
}

inline void write_envelope_tsv(std::ostream &out, const SurvivalEnvelope &above,
                               const SurvivalEnvelope &below) {
  out << "side\tk\tmean\tsd\tlo\thi\tseeds\n";
  for (Label side : {Label::above, Label::below}) {
    const SurvivalEnvelope &env = side == Label::above ? above : below;
    for (std::size_t i = 0; i < env.k.size(); ++i)
      out << side_name(side) << '\t' << env.k[i] << '\t' << format_double(env.mean[i]) << '\t'
          << format_double(env.sd[i]) << '\t' << format_double(env.lo[i]) << '\t'
          << format_double(env.hi[i]) << '\t' << env.seeds << '\n';
  }
}

inline Json distance_matrix_json(std::span<const double> qs, const DistanceMatrix &d) {
  Json j;
  j["q"] = std::vector<double>(qs.begin(), qs.end());
  j["ks_distance"] = d;
  return j;
}

/// Writes `content` to `path` through a temporary file and a rename, so a
/// reader never sees a partial file.
inline void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out)
      throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

template <typename Fn> void emit_file(const std::filesystem::path &path, Fn &&fn) {
  std::ostringstream buf;
  fn(buf);
  write_file_atomic(path, buf.str());
}

inline void emit_json(const std::filesystem::path &path, const Json &j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace retint

#endif // RETINT_OUTPUT_HPP
