#pragma once

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/nn/layers.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace motionstyle::stylizer {

enum class Mode { Supervised, Unsupervised };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Ablation switches. `no_latent` and `end_to_end` concern the codec the
/// stylizer is trained against; the rest change the network or objective.
struct Ablations {
  bool no_latent = false;
  bool no_prob_style = false;   // deterministic style vector instead of a Gaussian
  bool no_homo_style = false;   // homo-style KL reported but not optimised
  bool no_autoencoding = false; // reconstruction term dropped
  bool no_cycle = false;        // cycle term dropped
  bool prob_content = false;    // Gaussian content code with its own KL
  bool end_to_end = false;      // codec trained jointly from scratch

  std::vector<std::string> active() const;
};

struct StylizerConfig {
  Mode mode = Mode::Supervised;
  int n_labels = 4;
  int code_dim = 512;     // width of the motion code (codec latent)
  int content_dim = 512;
  int style_dim = 512;
  int hidden = 512;
  int label_embedding = 64;
  int generator_layers = 4;
  Ablations ablations;

  bool supervised() const { return mode == Mode::Supervised; }
  void validate() const;
};

template <typename T>
struct StyleDist {
  nn::Var<T> mu;
  nn::Var<T> logvar;  // constant zero with no_prob_style
};

template <typename T>
struct ContentOut {
  nn::Var<T> code;    // instance-normalized content code (a sample with prob_content)
  nn::Var<T> mu;      // prob_content only
  nn::Var<T> logvar;  // prob_content only
};

/// Content encoder, style encoder and AdaIN generator over [B, T, C] codes.
/// Labels are one per batch item and must be present exactly in supervised mode.
template <typename T>
class StylizerNet {
 public:
  StylizerNet(const StylizerConfig& config, std::uint64_t seed);

  /// Instance norm on the input and after every layer; halves the length.
  ContentOut<T> encode_content(const nn::Var<T>& z, std::mt19937_64* rng = nullptr) const;

  /// Convolutions, temporal average pooling, label embedding, Gaussian head.
  /// Throws LabelRequired / LabelForbidden, TooShort for fewer than 2 steps.
  StyleDist<T> encode_style(const nn::Var<T>& z, std::span<const int> labels) const;

  /// Reparameterised sample, or the mean when `rng` is null.
  nn::Var<T> sample(const StyleDist<T>& dist, std::mt19937_64* rng) const;

  /// Doubles the content length; AdaIN after every hidden layer with
  /// (gamma, beta) from an affine map of style code and label embedding.
  /// Throws ModeMismatch when label presence disagrees with the mode.
  nn::Var<T> generate(const nn::Var<T>& content, const nn::Var<T>& style,
                      std::span<const int> labels) const;

  const StylizerConfig& config() const { return config_; }
  nn::ParameterStore<T>& params() { return store_; }
  const nn::ParameterStore<T>& params() const { return store_; }

 private:
  nn::Var<T> condition(const nn::Var<T>& style, std::span<const int> labels) const;

  StylizerConfig config_;
  nn::ParameterStore<T> store_;
  // content encoder
  nn::Conv1d<T> ec1_, ec2_, ec3_, ec_logvar_;
  // style encoder
  nn::Conv1d<T> es1_, es2_, es3_;
  nn::Var<T> es_embedding_;
  nn::Linear<T> es_fc_, es_mu_, es_logvar_;
  // generator
  nn::Var<T> g_embedding_;
  nn::Linear<T> g_fc_;
  std::vector<nn::Conv1d<T>> g_convs_;
  std::vector<nn::Linear<T>> g_gamma_, g_beta_;
};

/// Per-channel gamma * (x - mean_t(x)) / std_t(x) + beta over time, with
/// x [B, T, C] and gamma, beta [B, 1, C]. Throws ShapeMismatch.
nn::Tensor<float> adain(const nn::Tensor<float>& x, const nn::Tensor<float>& gamma,
                        const nn::Tensor<float>& beta);

struct ContentCode {
  nn::Tensor<float> values;  // [1, T_c, content_dim]
};

struct StyleDistribution {
  Eigen::VectorXf mu;
  Eigen::VectorXf logvar;
  Eigen::VectorXf sigma() const { return (0.5f * logvar.array()).exp(); }
};

enum class StyleProvenance { Encoded, Sampled, SampledPrior, Interpolated };

struct StyleCode {
  Eigen::VectorXf values;
  StyleProvenance provenance = StyleProvenance::Encoded;
};

/// Frozen float stylizer on single clips.
class Stylizer {
 public:
  Stylizer(const StylizerConfig& config, std::uint64_t seed);

  ContentCode encode_content(const codec::MotionCode& code) const;
  StyleDistribution encode_style(const codec::MotionCode& code, std::optional<int> label) const;
  StyleCode sample_style(const StyleDistribution& dist, std::uint64_t seed) const;
  StyleCode sample_prior(std::uint64_t seed) const;
  /// Output code length is twice the content length.
  nn::Tensor<float> generate(const ContentCode& content, const StyleCode& style,
                             std::optional<int> label) const;

  const StylizerConfig& config() const { return net_.config(); }
  StylizerNet<float>& net() { return net_; }
  const StylizerNet<float>& net() const { return net_; }

  /// `provenance` is stored verbatim in stylizer.json.
  void save(const std::filesystem::path& dir, const std::string& provenance_json = "{}") const;
  static Stylizer load(const std::filesystem::path& dir);

 private:
  StylizerNet<float> net_;
};

/// Checks label presence against the mode: LabelRequired / LabelForbidden.
void check_label(Mode mode, bool has_label);

extern template class StylizerNet<float>;
extern template class StylizerNet<double>;

}  // namespace motionstyle::stylizer
