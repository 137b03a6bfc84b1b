#include "motionstyle/infer/pipeline.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/io.hpp"
#include "motionstyle/motion/kinematics.hpp"

namespace motionstyle::infer {

namespace fs = std::filesystem;
using motion::PoseSequence;

namespace {

// Codec compression times the content encoder's 2x.
int length_multiple(const ModelBundle& b) { return b.codec.config().downsample() * 2; }

PoseSequence normalized_padded(const PoseSequence& seq, const ModelBundle& b) {
  if (seq.frame_count() == 0) raise(ErrorCode::TooShort, "empty motion");
  PoseSequence out = motion::znormalize(seq, b.stats);
  out.frames = motion::pad_edge(out.frames, length_multiple(b));
  return out;
}

void require_label_mode(const ModelBundle& b, bool has_label) {
  const bool sup = b.stylizer.config().supervised();
  if (sup && !has_label) raise(ErrorCode::ModeMismatch, "supervised model needs a style label");
  if (!sup && has_label) raise(ErrorCode::ModeMismatch, "unsupervised model takes no style label");
}

}  // namespace

ModelBundle ModelBundle::load(const fs::path& dir) {
  if (!fs::exists(dir / "codec.json")) raise(ErrorCode::MissingCodec, "no codec checkpoint in " + dir.string());
  auto stats = motion::load_norm_stats(dir / "norm_stats.json");
  auto c = codec::Codec::load(dir);
  auto s = stylizer::Stylizer::load(dir);
  std::optional<gmp::GlobalMotionPredictor> g;
  if (fs::exists(dir / "gmp.json")) g.emplace(gmp::GlobalMotionPredictor::load(dir));
  return ModelBundle{std::move(stats), std::move(c), std::move(s), std::move(g)};
}

void ModelBundle::save(const fs::path& dir) const {
  fs::create_directories(dir);
  motion::save_norm_stats(stats, dir / "norm_stats.json");
  codec.save(dir);
  stylizer.save(dir);
  if (gmp) gmp->save(dir);
}

stylizer::StyleCode style_code_from_motion(const PoseSequence& style_motion, std::optional<int> label,
                                           const ModelBundle& bundle, const StylizeOptions& options) {
  require_label_mode(bundle, label.has_value());
  const auto code = bundle.codec.encode(normalized_padded(style_motion, bundle));
  const auto dist = bundle.stylizer.encode_style(code, label);
  if (options.sample_style) return bundle.stylizer.sample_style(dist, options.seed);
  return {dist.mu, stylizer::StyleProvenance::Encoded};
}

PoseSequence stylize_with_code(const PoseSequence& content, const stylizer::StyleCode& style,
                               std::optional<int> label, const ModelBundle& bundle, const StylizeOptions& options) {
  require_label_mode(bundle, label.has_value());
  const int frames = content.frame_count();
  const auto code = bundle.codec.encode(normalized_padded(content, bundle));
  const auto content_code = bundle.stylizer.encode_content(code);
  codec::MotionCode out_code = code;
  out_code.values = bundle.stylizer.generate(content_code, style, label);
  out_code.original_length = frames;
  PoseSequence out = bundle.codec.decode(out_code, content.skeleton);
  if (options.use_gmp && bundle.gmp) out = bundle.gmp->apply(out);
  out = motion::denormalize(out, bundle.stats);
  // The "without GMP" path keeps the content's own planar root motion.
  if (!options.use_gmp) out.frames.leftCols(3) = content.frames.leftCols(3);
  out.fps = content.fps;
  out.style_label = label;
  out.content_label = content.content_label;
  const auto layout = out.layout();
  if (options.recompute_contacts) {
    out = motion::recompute_contacts(out);
  } else {
    auto contacts = out.frames.middleCols(layout.contacts(), motion::PoseLayout::kContactChannels);
    contacts = (contacts.array() > 0.5f).cast<float>();
  }
  return out;
}

PoseSequence stylize_motion_based(const PoseSequence& content, const PoseSequence& style_motion,
                                  std::optional<int> label, const ModelBundle& bundle, const StylizeOptions& options) {
  const auto style = style_code_from_motion(style_motion, label, bundle, options);
  return stylize_with_code(content, style, label, bundle, options);
}

PoseSequence stylize_label_based(const PoseSequence& content, int label, std::uint64_t seed, const ModelBundle& bundle,
                                 const StylizeOptions& options) {
  if (!bundle.stylizer.config().supervised())
    raise(ErrorCode::UnsupervisedModel, "label-based stylization needs a supervised model");
  return stylize_with_code(content, bundle.stylizer.sample_prior(seed), label, bundle, options);
}

PoseSequence stylize_prior_based(const PoseSequence& content, std::uint64_t seed, const ModelBundle& bundle,
                                 const StylizeOptions& options) {
  if (bundle.stylizer.config().supervised())
    raise(ErrorCode::SupervisedModel, "prior-based stylization needs an unsupervised model");
  return stylize_with_code(content, bundle.stylizer.sample_prior(seed), std::nullopt, bundle, options);
}

stylizer::StyleCode mix_styles(const stylizer::StyleCode& a, const stylizer::StyleCode& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) raise(ErrorCode::OutOfRange, "alpha must lie in [0, 1]");
  if (a.values.size() != b.values.size()) raise(ErrorCode::DimMismatch, "style codes differ in width");
  if (alpha == 0.0) return {a.values, stylizer::StyleProvenance::Interpolated};
  if (alpha == 1.0) return {b.values, stylizer::StyleProvenance::Interpolated};
  const float w = static_cast<float>(alpha);
  return {(1.0f - w) * a.values + w * b.values, stylizer::StyleProvenance::Interpolated};
}

PoseSequence interpolate_styles(const stylizer::StyleCode& a, const stylizer::StyleCode& b, double alpha,
                                const PoseSequence& content, std::optional<int> label, const ModelBundle& bundle,
                                const StylizeOptions& options) {
  return stylize_with_code(content, mix_styles(a, b, alpha), label, bundle, options);
}

}  // namespace motionstyle::infer
