#pragma once

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/motion/pose.hpp"
#include "motionstyle/stylizer/stylizer.hpp"
#include "motionstyle/train/schedule.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace motionstyle::train {

struct LossWeights {
  double hsa = 1.0;
  double cyc = 0.1;
  double kl = 0.1;

  static LossWeights defaults(stylizer::Mode mode);
  void validate() const;
};

/// Values of one objective evaluation.
struct LossReport {
  double rec = 0.0;
  double hsa = 0.0;
  double cyc = 0.0;
  double kl = 0.0;
  double total = 0.0;
  bool grads_finite = true;
  int kl_terms = 0;  // style spaces contributing to L_kl
};

/// One training triplet: clips 1 and 2 share a source sequence, clip 3 comes
/// from a different one.
struct Triplet {
  motion::FrameMatrix p1, p2, p3;
  int seq12 = 0;
  int seq3 = 0;
};

/// Throws DatasetTooSmall with fewer than two sequences, TooShort when a
/// sequence is shorter than `length`.
Triplet sample_triplet(std::span<const motion::PoseSequence> dataset, int length, std::mt19937_64& rng);

/// Closed-form KL(a || b) of diagonal Gaussians, summed over dimensions.
/// Throws DimMismatch.
double kl_gaussians(const stylizer::StyleDistribution& a, const stylizer::StyleDistribution& b);

/// Effective multipliers after ablations: (rec, hsa, cyc, kl).
std::array<double, 4> effective_weights(const LossWeights& w, const stylizer::Ablations& a);

template <typename T>
struct Objective {
  nn::Var<T> total;  // differentiable combined objective
  LossReport report;
};

/// The combined objective on a batch of normalized pose windows [B, L, D].
/// Codes come from `codec` (frozen unless its parameters require gradients).
/// Labels are the style labels of clips 1/2 and of clip 3; pass empty spans
/// in unsupervised mode. `seed` drives every sample so the objective is a
/// deterministic function of the parameters. Throws NonFiniteLoss.
template <typename T>
Objective<T> compute_losses(const nn::Var<T>& p1, const nn::Var<T>& p2, const nn::Var<T>& p3,
                            std::span<const int> labels12, std::span<const int> labels3,
                            const stylizer::StylizerNet<T>& model, const codec::CodecNet<T>& codec,
                            const LossWeights& weights, std::uint64_t seed);

struct TrainConfig {
  stylizer::StylizerConfig model;
  LossWeights weights;
  Schedule schedule;
  std::uint64_t init_seed = 1;
  /// Optional CSV of (step, L_rec, L_hsa, L_cyc, L_kl, total).
  std::optional<std::filesystem::path> curves_csv;
  /// Stop once the smoothed total has not improved by 0.5% for this many
  /// steps; 0 disables.
  int plateau_patience = 0;
};

struct TrainResult {
  stylizer::Stylizer model;
  /// The codec used for training; differs from the input only for end_to_end.
  codec::Codec codec;
  std::vector<std::pair<int, LossReport>> curve;
  int steps_run = 0;
};

/// Trains a stylizer on normalized clips against `codec`. The codec stays
/// bit-identical unless `end_to_end`, which trains a fresh codec jointly.
/// Labels come from each clip's style_label (supervised mode).
/// Throws Diverged, MissingCodec, DatasetTooSmall, DimMismatch.
TrainResult train_stylizer(const codec::Codec* codec, std::span<const motion::PoseSequence> dataset,
                           const TrainConfig& config);

/// Identity codec matching a feature width, for the no_latent ablation.
codec::Codec identity_codec(int feature_dim, int latent_dim);

}  // namespace motionstyle::train
