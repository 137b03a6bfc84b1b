#pragma once

#include "motionstyle/eval/classifier.hpp"
#include "motionstyle/infer/pipeline.hpp"
#include "motionstyle/motion/pose.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace motionstyle::eval {

/// Mean with a 95% confidence half-width (1.96 s / sqrt(n)); the half-width
/// is absent for a single repeat.
struct Estimate {
  double mean = 0.0;
  std::optional<double> ci95;
  std::vector<double> values;
};

Estimate summarize(std::vector<double> values);

struct MetricReport {
  Estimate style_acc, content_acc, style_fid, content_fid, geo_dis, diversity, foot_skating;
  int repeats = 0;
};

struct ProtocolOptions {
  int repeats = 30;
  std::uint64_t seed = 1;
  /// Samples per content clip for the diversity metric (label-based or
  /// prior-based mode, whichever the model supports).
  int diversity_samples = 10;
  /// Content clips per repeat used for the diversity metric.
  int diversity_clips = 4;
  infer::StylizeOptions stylize;
  /// Optional CSV of stylized-output features (style classifier) of repeat 0.
  std::optional<std::filesystem::path> dump_features;
};

/// Repeats motion-based stylization of every test clip with a randomly
/// assigned style clip (and its label) from `style_source`, scoring each
/// repeat with the classifiers. Inputs are raw sequences with labels.
MetricReport evaluate_protocol(const infer::ModelBundle& bundle, const Classifier& style_clf,
                               const Classifier& content_clf, std::span<const motion::PoseSequence> test,
                               std::span<const motion::PoseSequence> style_source, const ProtocolOptions& options);

void write_report_json(const MetricReport& report, const std::filesystem::path& path);
void write_report_csv(const MetricReport& report, const std::filesystem::path& path);

}  // namespace motionstyle::eval
