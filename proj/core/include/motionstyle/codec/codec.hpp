#pragma once

#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/pose.hpp"
#include "motionstyle/nn/layers.hpp"
#include "motionstyle/train/schedule.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace motionstyle::codec {

/// `None` is the identity codec: features are zero-padded into the latent
/// width and cropped back, with no temporal compression.
enum class Variant { VAE, AE, None };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct CodecConfig {
  Variant variant = Variant::VAE;
  int feature_dim = 260;
  int latent_dim = 512;
  int hidden = 384;
  double lambda_kld = 1e-3;
  double lambda_l1 = 1e-3;
  double lambda_sms = 1e-3;

  /// Frames per code step: 4 for the convolutional variants, 1 for None.
  int downsample() const { return variant == Variant::None ? 1 : 4; }
  void validate() const;
};

/// Encoder output. `mu`/`logvar` are set for the VAE only; `z` is the
/// sample during training and the mean otherwise.
template <typename T>
struct Encoded {
  nn::Var<T> z;
  nn::Var<T> mu;
  nn::Var<T> logvar;
};

/// Convolutional motion autoencoder over [batch, time, feature] tensors.
/// Two stride-2 convolutions down, two upsample + convolution stages up.
template <typename T>
class CodecNet {
 public:
  CodecNet(const CodecConfig& config, std::uint64_t seed);

  /// Input length must be a multiple of downsample(). With `rng` the VAE
  /// draws a reparameterised sample, otherwise it returns the mean.
  Encoded<T> encode(const nn::Var<T>& x, std::mt19937_64* rng = nullptr) const;
  nn::Var<T> decode(const nn::Var<T>& z) const;

  const CodecConfig& config() const { return config_; }
  nn::ParameterStore<T>& params() { return store_; }
  const nn::ParameterStore<T>& params() const { return store_; }

 private:
  CodecConfig config_;
  nn::ParameterStore<T> store_;
  nn::Conv1d<T> enc1_, enc2_, enc2_logvar_, dec1_, dec2_;
  nn::Var<T> projection_;  // identity codec only: [1, feature_dim, latent_dim]
};

/// VAE: lambda_kld * KL(N(mu, sigma) || N(0, I)); AE: lambda_l1 * |z| +
/// lambda_sms * |z[t+1] - z[t]|. Both averaged per element. Throws
/// VariantMismatch when `enc` lacks the fields of the configured variant.
template <typename T>
nn::Var<T> latent_reg_loss(const CodecConfig& config, const Encoded<T>& enc);

/// Latent sequence of one clip, [1, T_z, D_z].
struct MotionCode {
  nn::Tensor<float> values;
  double source_fps = 30.0;
  Variant variant = Variant::VAE;
  int original_length = 0;  // frames before padding

  int steps() const { return values.t(); }
  int dim() const { return values.c(); }
};

/// Frozen float codec working on pose sequences.
class Codec {
 public:
  Codec(const CodecConfig& config, std::uint64_t seed);

  /// Throws NotNormalized. Right-pads by edge replication to a multiple of
  /// downsample(); the original length is recorded in the code.
  MotionCode encode(const motion::PoseSequence& seq) const;

  /// Decodes to 4 * T_z frames, cropped to the recorded length when known.
  /// The result is normalized and carries `skeleton`.
  motion::PoseSequence decode(const MotionCode& code,
                              std::shared_ptr<const motion::Skeleton> skeleton = nullptr) const;

  const CodecConfig& config() const { return net_.config(); }
  CodecNet<float>& net() { return net_; }
  const CodecNet<float>& net() const { return net_; }

  /// Writes `codec.json` and `codec.bin` into `dir`.
  void save(const std::filesystem::path& dir) const;
  static Codec load(const std::filesystem::path& dir);

 private:
  CodecNet<float> net_;
};

struct CodecReport {
  double initial_heldout_loss = 0.0;
  double final_heldout_loss = 0.0;
  double heldout_mpjpe_mm = 0.0;
  std::vector<std::pair<int, double>> curve;  // (step, training loss)
};

/// Fits the codec on normalized clips with L1 frame reconstruction plus the
/// latent regulariser. Held-out MPJPE uses `stats` to undo normalization.
/// Throws Diverged on a non-finite loss, NotNormalized on raw input.
CodecReport train_codec(Codec& codec, std::span<const motion::PoseSequence> train,
                        std::span<const motion::PoseSequence> heldout,
                        const motion::NormStats& stats, const train::Schedule& schedule);

/// Held-out L1 reconstruction loss (no regulariser) averaged over clips.
double reconstruction_loss(const Codec& codec, std::span<const motion::PoseSequence> clips);

/// Mean root-aligned MPJPE in millimetres of decode(encode(x)) on normalized clips.
double reconstruction_mpjpe_mm(const Codec& codec, std::span<const motion::PoseSequence> clips,
                               const motion::NormStats& stats);

extern template class CodecNet<float>;
extern template class CodecNet<double>;

}  // namespace motionstyle::codec
