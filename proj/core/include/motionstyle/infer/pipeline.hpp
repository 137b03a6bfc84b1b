#pragma once

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/gmp/gmp.hpp"
#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/pose.hpp"
#include "motionstyle/stylizer/stylizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace motionstyle::infer {

/// Everything needed to stylize raw pose sequences.
struct ModelBundle {
  motion::NormStats stats;
  codec::Codec codec;
  stylizer::Stylizer stylizer;
  std::optional<gmp::GlobalMotionPredictor> gmp;

  /// Reads norm_stats.json, codec.*, stylizer.* and (if present) gmp.* from
  /// `dir`. Throws MissingCodec when the codec files are absent.
  static ModelBundle load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;
};

struct StylizeOptions {
  /// Replace root channels with the global-motion prediction. When false the
  /// planar root channels [0:3] are copied from the content clip. With the
  /// flag on but no predictor in the bundle the decoded root is kept.
  bool use_gmp = true;
  /// Motion-based mode: draw from the style distribution instead of its mean.
  bool sample_style = false;
  std::uint64_t seed = 0;
  /// Rewrite contact labels from forward kinematics of the output; otherwise
  /// the decoded contact channels are thresholded at 0.5.
  bool recompute_contacts = true;
};

/// Style code of a raw style clip (mean, or a sample when requested).
stylizer::StyleCode style_code_from_motion(const motion::PoseSequence& style_motion, std::optional<int> label,
                                           const ModelBundle& bundle, const StylizeOptions& options = {});

/// Core path shared by every mode: content encoding, generation with `style`,
/// decoding, root prediction and denormalization. Output has the content's
/// frame count and fps.
motion::PoseSequence stylize_with_code(const motion::PoseSequence& content, const stylizer::StyleCode& style,
                                       std::optional<int> label, const ModelBundle& bundle,
                                       const StylizeOptions& options = {});

/// Throws ModeMismatch when label presence disagrees with the model mode,
/// TooShort for an empty style clip.
motion::PoseSequence stylize_motion_based(const motion::PoseSequence& content,
                                          const motion::PoseSequence& style_motion, std::optional<int> label,
                                          const ModelBundle& bundle, const StylizeOptions& options = {});

/// Style code drawn from N(0, I) with `seed`; supervised models only
/// (UnsupervisedModel otherwise).
motion::PoseSequence stylize_label_based(const motion::PoseSequence& content, int label, std::uint64_t seed,
                                         const ModelBundle& bundle, const StylizeOptions& options = {});

/// Style code drawn from N(0, I) with `seed`; unsupervised models only
/// (SupervisedModel otherwise).
motion::PoseSequence stylize_prior_based(const motion::PoseSequence& content, std::uint64_t seed,
                                         const ModelBundle& bundle, const StylizeOptions& options = {});

/// (1 - alpha) * a + alpha * b. Throws OutOfRange for alpha outside [0, 1].
stylizer::StyleCode mix_styles(const stylizer::StyleCode& a, const stylizer::StyleCode& b, double alpha);

motion::PoseSequence interpolate_styles(const stylizer::StyleCode& a, const stylizer::StyleCode& b, double alpha,
                                        const motion::PoseSequence& content, std::optional<int> label,
                                        const ModelBundle& bundle, const StylizeOptions& options = {});

}  // namespace motionstyle::infer
