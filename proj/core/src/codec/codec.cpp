#include "motionstyle/codec/codec.hpp"

#include "checkpoint.hpp"
#include "motionstyle/error.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/skeleton.hpp"

#include <cmath>
#include <sstream>

namespace motionstyle::codec {

using nn::Tensor;
using nn::Var;
using nlohmann::json;

namespace {

constexpr float kSlope = 0.2f;

json config_json(const CodecConfig& c) {
  return {{"variant", to_string(c.variant)}, {"feature_dim", c.feature_dim},
          {"latent_dim", c.latent_dim},      {"hidden", c.hidden},
          {"lambda_kld", c.lambda_kld},      {"lambda_l1", c.lambda_l1},
          {"lambda_sms", c.lambda_sms}};
}

CodecConfig config_from_json(const json& j) {
  CodecConfig c;
  c.variant = variant_from_string(j.at("variant"));
  c.feature_dim = j.at("feature_dim");
  c.latent_dim = j.at("latent_dim");
  c.hidden = j.at("hidden");
  c.lambda_kld = j.at("lambda_kld");
  c.lambda_l1 = j.at("lambda_l1");
  c.lambda_sms = j.at("lambda_sms");
  return c;
}

void require_normalized(const motion::PoseSequence& seq) {
  if (!seq.normalized) raise(ErrorCode::NotNormalized, "codec expects z-normalized features");
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::VAE: return "vae";
    case Variant::AE: return "ae";
    case Variant::None: return "none";
  }
  return "vae";
}

Variant variant_from_string(const std::string& s) {
  if (s == "vae" || s == "VAE") return Variant::VAE;
  if (s == "ae" || s == "AE") return Variant::AE;
  if (s == "none") return Variant::None;
  raise(ErrorCode::Usage, "unknown codec variant '" + s + "'");
}

void CodecConfig::validate() const {
  if (feature_dim <= 0 || latent_dim <= 0 || hidden <= 0)
    raise(ErrorCode::DimMismatch, "codec dimensions must be positive");
  if (lambda_kld < 0 || lambda_l1 < 0 || lambda_sms < 0)
    raise(ErrorCode::OutOfRange, "codec regulariser weights must be non-negative");
  if (variant == Variant::None && latent_dim < feature_dim)
    raise(ErrorCode::DimMismatch, "identity codec needs latent_dim >= feature_dim");
}

template <typename T>
CodecNet<T>::CodecNet(const CodecConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const int d = config_.feature_dim;
  const int h = config_.hidden;
  const int z = config_.latent_dim;
  if (config_.variant == Variant::None) {
    Tensor<T> p(1, d, z);
    for (int i = 0; i < d; ++i) p.at(0, i, i) = T(1);
    projection_ = nn::constant(std::move(p));
    return;
  }
  enc1_ = nn::Conv1d<T>::make(store_, "enc1", d, h, 3, 2, rng);
  enc2_ = nn::Conv1d<T>::make(store_, "enc2", h, z, 3, 2, rng);
  if (config_.variant == Variant::VAE) {
    enc2_logvar_ = nn::Conv1d<T>::make(store_, "enc2_logvar", h, z, 3, 2, rng);
    // Start near unit variance scaled down so early samples stay close to the mean.
    enc2_logvar_.bias.mutable_value().fill(T(-4));
  }
  dec1_ = nn::Conv1d<T>::make(store_, "dec1", z, h, 3, 1, rng);
  dec2_ = nn::Conv1d<T>::make(store_, "dec2", h, d, 3, 1, rng);
}

template <typename T>
Encoded<T> CodecNet<T>::encode(const Var<T>& x, std::mt19937_64* rng) const {
  if (x.c() != config_.feature_dim) raise(ErrorCode::ShapeMismatch, "codec: feature width mismatch");
  if (x.t() % config_.downsample() != 0)
    raise(ErrorCode::ShapeMismatch, "codec: length must be a multiple of the downsampling factor");
  Encoded<T> out;
  if (config_.variant == Variant::None) {
    out.z = nn::linear(x, projection_, Var<T>());
    return out;
  }
  const auto h = nn::leaky_relu(enc1_(x), T(kSlope));
  out.mu = enc2_(h);
  if (config_.variant == Variant::VAE) {
    out.logvar = enc2_logvar_(h);
    if (rng) {
      Tensor<T> noise(out.mu.n(), out.mu.t(), out.mu.c());
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = static_cast<T>(normal(*rng));
      out.z = nn::reparameterize(out.mu, out.logvar, noise);
    } else {
      out.z = out.mu;
    }
  } else {
    out.z = out.mu;
    out.mu = Var<T>();
  }
  return out;
}

template <typename T>
Var<T> CodecNet<T>::decode(const Var<T>& z) const {
  if (z.c() != config_.latent_dim) raise(ErrorCode::ShapeMismatch, "codec: latent width mismatch");
  if (config_.variant == Variant::None) {
    // Crop back to the feature width: z * P^T.
    const auto& p = projection_.value();
    Tensor<T> pt(1, config_.latent_dim, config_.feature_dim);
    for (int i = 0; i < config_.feature_dim; ++i) pt.at(0, i, i) = p.at(0, i, i);
    return nn::linear(z, nn::constant(std::move(pt)), Var<T>());
  }
  const auto h = nn::leaky_relu(dec1_(nn::upsample(z, 2)), T(kSlope));
  return dec2_(nn::upsample(h, 2));
}

template <typename T>
Var<T> latent_reg_loss(const CodecConfig& config, const Encoded<T>& enc) {
  switch (config.variant) {
    case Variant::VAE: {
      if (!enc.mu.defined() || !enc.logvar.defined())
        raise(ErrorCode::VariantMismatch, "VAE regulariser needs mean and log-variance");
      const int per_step = enc.mu.c();
      // kl_standard sums over channels per sample; dividing by every element
      // (steps x channels) gives the per-element average.
      auto kl = nn::kl_standard(enc.mu, enc.logvar, false);
      const T elements = static_cast<T>(per_step) * static_cast<T>(enc.mu.t());
      return nn::scale(kl, static_cast<T>(config.lambda_kld) / elements);
    }
    case Variant::AE: {
      if (!enc.z.defined() || enc.mu.defined())
        raise(ErrorCode::VariantMismatch, "AE regulariser takes a deterministic code");
      std::vector<Var<T>> terms{nn::mean_abs(enc.z)};
      std::vector<T> weights{static_cast<T>(config.lambda_l1)};
      if (enc.z.t() >= 2) {
        terms.push_back(nn::mean_abs(nn::temporal_diff(enc.z)));
        weights.push_back(static_cast<T>(config.lambda_sms));
      }
      return nn::weighted_sum(terms, weights);
    }
    case Variant::None:
      return nn::constant(Tensor<T>::scalar(T(0)));
  }
  return nn::constant(Tensor<T>::scalar(T(0)));
}

template class CodecNet<float>;
template class CodecNet<double>;
template Var<float> latent_reg_loss<float>(const CodecConfig&, const Encoded<float>&);
template Var<double> latent_reg_loss<double>(const CodecConfig&, const Encoded<double>&);

Codec::Codec(const CodecConfig& config, std::uint64_t seed) : net_(config, seed) {}

MotionCode Codec::encode(const motion::PoseSequence& seq) const {
  require_normalized(seq);
  const int k = config().downsample();
  const auto padded = motion::pad_edge(seq.frames, k);
  nn::NoGradGuard guard;
  const auto enc = net_.encode(nn::constant(motion::to_tensor<float>(padded)));
  MotionCode code;
  code.values = enc.z.value();
  code.source_fps = seq.fps;
  code.variant = config().variant;
  code.original_length = seq.frame_count();
  return code;
}

motion::PoseSequence Codec::decode(const MotionCode& code,
                                   std::shared_ptr<const motion::Skeleton> skeleton) const {
  nn::NoGradGuard guard;
  const auto out = net_.decode(nn::constant(code.values));
  motion::PoseSequence seq;
  seq.frames = motion::to_frames(out.value());
  if (code.original_length > 0 && code.original_length < seq.frame_count())
    seq.frames = seq.frames.topRows(code.original_length).eval();
  seq.fps = code.source_fps;
  seq.skeleton = skeleton ? skeleton : motion::default_skeleton();
  seq.normalized = true;
  return seq;
}

void Codec::save(const std::filesystem::path& dir) const {
  nn::TensorMap tensors;
  net_.params().export_to(tensors);
  checkpoint::save(dir, "codec", {{"config", config_json(config())}, {"norm_stats", "norm_stats.json"}},
                   tensors);
}

Codec Codec::load(const std::filesystem::path& dir) {
  const json meta = checkpoint::load_meta(dir, "codec");
  Codec codec(config_from_json(meta.at("config")), 0);
  codec.net_.params().import_from(checkpoint::load_tensors(dir, "codec"));
  return codec;
}

double reconstruction_loss(const Codec& codec, std::span<const motion::PoseSequence> clips) {
  if (clips.empty()) return 0.0;
  double total = 0.0;
  for (const auto& clip : clips) {
    const auto recon = codec.decode(codec.encode(clip), clip.skeleton);
    total += (recon.frames - clip.frames).cwiseAbs().mean();
  }
  return total / static_cast<double>(clips.size());
}

double reconstruction_mpjpe_mm(const Codec& codec, std::span<const motion::PoseSequence> clips,
                               const motion::NormStats& stats) {
  if (clips.empty()) return 0.0;
  double total = 0.0;
  for (const auto& clip : clips) {
    const auto recon = codec.decode(codec.encode(clip), clip.skeleton);
    total += motion::mpjpe(motion::denormalize(recon, stats), motion::denormalize(clip, stats));
  }
  return 1000.0 * total / static_cast<double>(clips.size());
}

CodecReport train_codec(Codec& codec, std::span<const motion::PoseSequence> train,
                        std::span<const motion::PoseSequence> heldout, const motion::NormStats& stats,
                        const train::Schedule& schedule) {
  for (const auto& c : train) require_normalized(c);
  for (const auto& c : heldout) require_normalized(c);
  CodecReport report;
  report.initial_heldout_loss = reconstruction_loss(codec, heldout);
  auto& net = codec.net();
  if (net.params().entries().empty()) {
    report.final_heldout_loss = report.initial_heldout_loss;
    report.heldout_mpjpe_mm = reconstruction_mpjpe_mm(codec, heldout, stats);
    return report;
  }
  std::mt19937_64 rng(schedule.seed);
  nn::Adam<float> adam(schedule.adam);
  adam.attach(net.params());
  const int window = schedule.window / 4 * 4;
  double smoothed = 0.0;
  for (int step = 0; step < schedule.steps; ++step) {
    const auto windows = motion::random_windows(train, window, schedule.batch, rng);
    const auto x = nn::constant(motion::stack<float>(windows));
    const auto enc = net.encode(x, &rng);
    const auto recon = net.decode(enc.z);
    const auto loss = nn::add(nn::l1_loss(recon, x), latent_reg_loss(codec.config(), enc));
    const double value = loss.item();
    if (!std::isfinite(value)) raise(ErrorCode::Diverged, "codec training loss is not finite");
    adam.zero_grad();
    nn::backward(loss);
    adam.step();
    smoothed = step == 0 ? value : 0.98 * smoothed + 0.02 * value;
    if (step % std::max(1, schedule.log_every) == 0 || step + 1 == schedule.steps) {
      report.curve.emplace_back(step, value);
      if (schedule.log) {
        std::ostringstream msg;
        msg << "codec step " << step << " loss " << value << " smoothed " << smoothed;
        schedule.log(msg.str());
      }
    }
  }
  report.final_heldout_loss = reconstruction_loss(codec, heldout);
  report.heldout_mpjpe_mm = reconstruction_mpjpe_mm(codec, heldout, stats);
  return report;
}

}  // namespace motionstyle::codec
