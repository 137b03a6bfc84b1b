#pragma once

#include "motionstyle/motion/pose.hpp"
#include "motionstyle/nn/layers.hpp"
#include "motionstyle/train/schedule.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace motionstyle::eval {

enum class Target { Style, Content };

std::string to_string(Target t);

struct ClassifierConfig {
  Target target = Target::Style;
  int n_labels = 4;
  int feature_dim = 260;
  int hidden = 128;
  int penultimate = 256;
};

/// Three temporal convolutions, global average pooling, linear head. The
/// pooled activation is the feature extractor output.
class Classifier {
 public:
  Classifier(const ClassifierConfig& config, std::uint64_t seed);

  /// Inputs are normalized sequences (any length >= 4).
  Eigen::VectorXf features(const motion::PoseSequence& seq) const;
  Eigen::MatrixXd features(std::span<const motion::PoseSequence> seqs) const;
  int predict(const motion::PoseSequence& seq) const;

  /// Label of `seq` for this classifier's target; throws LabelRequired.
  int label_of(const motion::PoseSequence& seq) const;

  const ClassifierConfig& config() const { return config_; }
  nn::ParameterStore<float>& params() { return store_; }

  /// [B, T, D] -> (features [B, 1, P], logits [B, 1, K]).
  std::pair<nn::Var<float>, nn::Var<float>> forward(const nn::Var<float>& x) const;

  /// Writes `classifier_<target>.json/.bin`.
  void save(const std::filesystem::path& dir) const;
  static Classifier load(const std::filesystem::path& dir, Target target);

 private:
  ClassifierConfig config_;
  nn::ParameterStore<float> store_;
  nn::Conv1d<float> c1_, c2_, c3_;
  nn::Linear<float> head_;
};

struct ClassifierReport {
  double train_accuracy = 0.0;
  double heldout_accuracy = 0.0;
  double final_loss = 0.0;
};

/// Cross-entropy training on random crops of normalized labelled clips.
/// Throws Diverged.
ClassifierReport train_classifier(Classifier& clf, std::span<const motion::PoseSequence> train,
                                  std::span<const motion::PoseSequence> heldout, const train::Schedule& schedule);

/// Fraction of clips whose predicted class equals `labels[i]`.
double accuracy(const Classifier& clf, std::span<const motion::PoseSequence> outputs, std::span<const int> labels);

}  // namespace motionstyle::eval
