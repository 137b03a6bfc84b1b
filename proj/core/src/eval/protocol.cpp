#include "motionstyle/eval/protocol.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/eval/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

namespace motionstyle::eval {

using nlohmann::json;

Estimate summarize(std::vector<double> values) {
  Estimate e;
  e.values = std::move(values);
  const auto n = static_cast<double>(e.values.size());
  if (e.values.empty()) return e;
  e.mean = std::accumulate(e.values.begin(), e.values.end(), 0.0) / n;
  if (e.values.size() > 1) {
    double ss = 0.0;
    for (double v : e.values) ss += (v - e.mean) * (v - e.mean);
    e.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return e;
}

namespace {

std::vector<motion::PoseSequence> normalized(std::span<const motion::PoseSequence> seqs,
                                             const motion::NormStats& stats) {
  std::vector<motion::PoseSequence> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(motion::znormalize(s, stats));
  return out;
}

void dump_features(const std::filesystem::path& path, const Eigen::MatrixXd& f, std::span<const int> labels) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << "label";
  for (Eigen::Index c = 0; c < f.cols(); ++c) out << ",f" << c;
  out << '\n' << std::setprecision(9);
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    out << labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < f.cols(); ++c) out << ',' << f(r, c);
    out << '\n';
  }
}

}  // namespace

MetricReport evaluate_protocol(const infer::ModelBundle& bundle, const Classifier& style_clf,
                               const Classifier& content_clf, std::span<const motion::PoseSequence> test,
                               std::span<const motion::PoseSequence> style_source, const ProtocolOptions& options) {
  if (options.repeats < 1) raise(ErrorCode::OutOfRange, "repeats must be >= 1");
  if (test.size() < 2 || style_source.size() < 2) raise(ErrorCode::TooFew, "protocol needs at least two clips");
  const bool supervised = bundle.stylizer.config().mode == stylizer::Mode::Supervised;

  // Real-feature references do not depend on the repeat.
  const auto style_real = normalized(style_source, bundle.stats);
  const auto content_real = normalized(test, bundle.stats);
  const Eigen::MatrixXd style_ref = style_clf.features(style_real);
  const Eigen::MatrixXd content_ref = content_clf.features(content_real);

  // Foot skating is measured on the decoded contact channels.
  infer::StylizeOptions stylize = options.stylize;
  stylize.recompute_contacts = false;

  std::vector<double> sa, ca, sf, cf, geo, div, skate;
  for (int r = 0; r < options.repeats; ++r) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ull);
    std::uniform_int_distribution<std::size_t> pick(0, style_source.size() - 1);
    std::vector<motion::PoseSequence> outs;
    std::vector<int> style_labels, content_labels;
    double geo_sum = 0.0, skate_sum = 0.0;
    for (const auto& content : test) {
      const auto& style = style_source[pick(rng)];
      const int target = style_clf.label_of(style);
      std::optional<int> label;
      if (supervised) label = target;
      stylize.seed = rng();
      auto out = infer::stylize_motion_based(content, style, label, bundle, stylize);
      geo_sum += geodesic_distance(content, out);
      skate_sum += foot_skating(out);
      outs.push_back(motion::znormalize(out, bundle.stats));
      style_labels.push_back(target);
      content_labels.push_back(content_clf.label_of(content));
    }
    const double n = static_cast<double>(test.size());
    sa.push_back(accuracy(style_clf, outs, style_labels));
    ca.push_back(accuracy(content_clf, outs, content_labels));
    const Eigen::MatrixXd style_out = style_clf.features(outs);
    sf.push_back(fid(style_out, style_ref));
    cf.push_back(fid(content_clf.features(outs), content_ref));
    geo.push_back(geo_sum / n);
    skate.push_back(skate_sum / n);
    if (r == 0 && options.dump_features) dump_features(*options.dump_features, style_out, style_labels);

    if (options.diversity_samples >= 2 && options.diversity_clips > 0) {
      std::uniform_int_distribution<std::size_t> pick_content(0, test.size() - 1);
      std::uniform_int_distribution<int> pick_label(0, bundle.stylizer.config().n_labels - 1);
      double d = 0.0;
      for (int k = 0; k < options.diversity_clips; ++k) {
        const auto& content = test[pick_content(rng)];
        const int label = pick_label(rng);
        std::vector<motion::PoseSequence> samples;
        for (int s = 0; s < options.diversity_samples; ++s) {
          const std::uint64_t seed = rng();
          auto out = supervised ? infer::stylize_label_based(content, label, seed, bundle, stylize)
                                : infer::stylize_prior_based(content, seed, bundle, stylize);
          samples.push_back(motion::znormalize(out, bundle.stats));
        }
        d += diversity(style_clf, samples);
      }
      div.push_back(d / options.diversity_clips);
    }
  }

  MetricReport report;
  report.repeats = options.repeats;
  report.style_acc = summarize(std::move(sa));
  report.content_acc = summarize(std::move(ca));
  report.style_fid = summarize(std::move(sf));
  report.content_fid = summarize(std::move(cf));
  report.geo_dis = summarize(std::move(geo));
  report.diversity = summarize(std::move(div));
  report.foot_skating = summarize(std::move(skate));
  return report;
}

namespace {

const std::vector<std::pair<const char*, const Estimate MetricReport::*>>& metric_fields() {
  static const std::vector<std::pair<const char*, const Estimate MetricReport::*>> fields = {
      {"style_acc", &MetricReport::style_acc},     {"content_acc", &MetricReport::content_acc},
      {"style_fid", &MetricReport::style_fid},     {"content_fid", &MetricReport::content_fid},
      {"geo_dis", &MetricReport::geo_dis},         {"diversity", &MetricReport::diversity},
      {"foot_skating", &MetricReport::foot_skating}};
  return fields;
}

}  // namespace

void write_report_json(const MetricReport& report, const std::filesystem::path& path) {
  json j;
  j["repeats"] = report.repeats;
  for (const auto& [name, field] : metric_fields()) {
    const Estimate& e = report.*field;
    j["metrics"][name] = {{"mean", e.mean},
                          {"ci95", e.ci95 ? json(*e.ci95) : json(nullptr)},
                          {"values", e.values}};
  }
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_report_csv(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << "metric,mean,ci95,repeats\n" << std::setprecision(9);
  for (const auto& [name, field] : metric_fields()) {
    const Estimate& e = report.*field;
    out << name << ',' << e.mean << ',';
    if (e.ci95) out << *e.ci95;
    out << ',' << e.values.size() << '\n';
  }
}

}  // namespace motionstyle::eval
