#include "motionstyle/stylizer/stylizer.hpp"

#include "checkpoint.hpp"
#include "motionstyle/error.hpp"

#include <cmath>

namespace motionstyle::stylizer {

using nn::Tensor;
using nn::Var;
using nlohmann::json;

namespace {

constexpr float kSlope = 0.2f;
constexpr double kNormEps = 1e-5;

json ablations_json(const Ablations& a) {
  return {{"no_latent", a.no_latent},         {"no_prob_style", a.no_prob_style},
          {"no_homo_style", a.no_homo_style}, {"no_autoencoding", a.no_autoencoding},
          {"no_cycle", a.no_cycle},           {"prob_content", a.prob_content},
          {"end_to_end", a.end_to_end}};
}

Ablations ablations_from_json(const json& j) {
  Ablations a;
  a.no_latent = j.value("no_latent", false);
  a.no_prob_style = j.value("no_prob_style", false);
  a.no_homo_style = j.value("no_homo_style", false);
  a.no_autoencoding = j.value("no_autoencoding", false);
  a.no_cycle = j.value("no_cycle", false);
  a.prob_content = j.value("prob_content", false);
  a.end_to_end = j.value("end_to_end", false);
  return a;
}

template <typename T>
Tensor<T> gaussian_noise(int n, int t, int c, std::mt19937_64& rng) {
  Tensor<T> noise(n, t, c);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = static_cast<T>(normal(rng));
  return noise;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::Supervised ? "supervised" : "unsupervised"; }

Mode mode_from_string(const std::string& s) {
  if (s == "supervised") return Mode::Supervised;
  if (s == "unsupervised") return Mode::Unsupervised;
  raise(ErrorCode::Usage, "unknown stylizer mode '" + s + "'");
}

std::vector<std::string> Ablations::active() const {
  std::vector<std::string> out;
  const std::pair<const char*, bool> flags[] = {
      {"no_latent", no_latent}, {"no_prob_style", no_prob_style}, {"no_homo_style", no_homo_style},
      {"no_autoencoding", no_autoencoding}, {"no_cycle", no_cycle}, {"prob_content", prob_content},
      {"end_to_end", end_to_end}};
  for (const auto& [name, on] : flags)
    if (on) out.push_back(name);
  return out;
}

void StylizerConfig::validate() const {
  if (code_dim <= 0 || content_dim <= 0 || style_dim <= 0 || hidden <= 0 || label_embedding <= 0)
    raise(ErrorCode::DimMismatch, "stylizer dimensions must be positive");
  if (generator_layers < 2) raise(ErrorCode::OutOfRange, "generator needs at least 2 layers");
  if (supervised() && n_labels < 1) raise(ErrorCode::OutOfRange, "supervised stylizer needs labels");
  if (ablations.no_latent && ablations.end_to_end)
    raise(ErrorCode::Usage, "no_latent and end_to_end are mutually exclusive");
}

void check_label(Mode mode, bool has_label) {
  if (mode == Mode::Supervised && !has_label)
    raise(ErrorCode::LabelRequired, "supervised model needs a style label");
  if (mode == Mode::Unsupervised && has_label)
    raise(ErrorCode::LabelForbidden, "unsupervised model takes no style label");
}

template <typename T>
StylizerNet<T>::StylizerNet(const StylizerConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const int z = config_.code_dim;
  const int h = config_.hidden;
  const int e = config_.label_embedding;
  const bool sup = config_.supervised();

  ec1_ = nn::Conv1d<T>::make(store_, "content.conv1", z, h, 3, 1, rng);
  ec2_ = nn::Conv1d<T>::make(store_, "content.conv2", h, h, 3, 2, rng);
  ec3_ = nn::Conv1d<T>::make(store_, "content.conv3", h, config_.content_dim, 3, 1, rng);
  if (config_.ablations.prob_content) {
    ec_logvar_ = nn::Conv1d<T>::make(store_, "content.logvar", h, config_.content_dim, 3, 1, rng);
    ec_logvar_.bias.mutable_value().fill(T(-2));
  }

  es1_ = nn::Conv1d<T>::make(store_, "style.conv1", z, h, 3, 1, rng);
  es2_ = nn::Conv1d<T>::make(store_, "style.conv2", h, h, 3, 2, rng);
  es3_ = nn::Conv1d<T>::make(store_, "style.conv3", h, h, 3, 1, rng);
  const int pooled = h + (sup ? e : 0);
  if (sup) es_embedding_ = store_.add_uniform("style.embedding", 1, config_.n_labels, e, 1, rng);
  es_fc_ = nn::Linear<T>::make(store_, "style.fc", pooled, h, rng);
  es_mu_ = nn::Linear<T>::make(store_, "style.mu", h, config_.style_dim, rng);
  if (!config_.ablations.no_prob_style) {
    es_logvar_ = nn::Linear<T>::make(store_, "style.logvar", h, config_.style_dim, rng);
    es_logvar_.bias.mutable_value().fill(T(-2));
  }

  const int cond = config_.style_dim + (sup ? e : 0);
  if (sup) g_embedding_ = store_.add_uniform("gen.embedding", 1, config_.n_labels, e, 1, rng);
  g_fc_ = nn::Linear<T>::make(store_, "gen.fc", cond, h, rng);
  const int layers = config_.generator_layers;
  for (int l = 0; l < layers; ++l) {
    const int cin = l == 0 ? config_.content_dim : h;
    const int cout = l + 1 == layers ? z : h;
    const std::string name = "gen.conv" + std::to_string(l + 1);
    g_convs_.push_back(nn::Conv1d<T>::make(store_, name, cin, cout, 3, 1, rng));
    if (l + 1 < layers) {
      auto gamma = nn::Linear<T>::make(store_, name + ".gamma", h, h, rng);
      gamma.bias.mutable_value().fill(T(1));
      g_gamma_.push_back(gamma);
      g_beta_.push_back(nn::Linear<T>::make(store_, name + ".beta", h, h, rng));
    }
  }
}

template <typename T>
ContentOut<T> StylizerNet<T>::encode_content(const Var<T>& z, std::mt19937_64* rng) const {
  if (z.c() != config_.code_dim) raise(ErrorCode::DimMismatch, "content encoder: code width mismatch");
  const T eps = static_cast<T>(kNormEps);
  auto h = nn::instance_norm(z, eps);
  h = nn::leaky_relu(nn::instance_norm(ec1_(h), eps), T(kSlope));
  h = nn::leaky_relu(nn::instance_norm(ec2_(h), eps), T(kSlope));
  ContentOut<T> out;
  out.code = nn::instance_norm(ec3_(h), eps);
  if (config_.ablations.prob_content) {
    out.mu = out.code;
    out.logvar = ec_logvar_(h);
    if (rng) {
      out.code = nn::reparameterize(out.mu, out.logvar,
                                    gaussian_noise<T>(out.mu.n(), out.mu.t(), out.mu.c(), *rng));
    }
  }
  return out;
}

template <typename T>
StyleDist<T> StylizerNet<T>::encode_style(const Var<T>& z, std::span<const int> labels) const {
  check_label(config_.mode, !labels.empty());
  if (z.c() != config_.code_dim) raise(ErrorCode::DimMismatch, "style encoder: code width mismatch");
  if (z.t() < 2) raise(ErrorCode::TooShort, "style encoder needs at least 2 code steps");
  auto h = nn::leaky_relu(es1_(z), T(kSlope));
  h = nn::leaky_relu(es2_(h), T(kSlope));
  h = nn::leaky_relu(es3_(h), T(kSlope));
  auto pooled = nn::mean_time(h);
  if (config_.supervised()) {
    if (static_cast<int>(labels.size()) != z.n()) raise(ErrorCode::ShapeMismatch, "one label per clip");
    pooled = nn::concat_channels(pooled, nn::embedding(es_embedding_, labels));
  }
  const auto f = nn::leaky_relu(es_fc_(pooled), T(kSlope));
  StyleDist<T> dist;
  dist.mu = es_mu_(f);
  if (config_.ablations.no_prob_style)
    dist.logvar = nn::constant(Tensor<T>(dist.mu.n(), 1, dist.mu.c()));
  else
    dist.logvar = es_logvar_(f);
  return dist;
}

template <typename T>
Var<T> StylizerNet<T>::sample(const StyleDist<T>& dist, std::mt19937_64* rng) const {
  if (!rng || config_.ablations.no_prob_style) return dist.mu;
  return nn::reparameterize(dist.mu, dist.logvar,
                            gaussian_noise<T>(dist.mu.n(), dist.mu.t(), dist.mu.c(), *rng));
}

template <typename T>
Var<T> StylizerNet<T>::condition(const Var<T>& style, std::span<const int> labels) const {
  if (style.c() != config_.style_dim) raise(ErrorCode::DimMismatch, "generator: style width mismatch");
  Var<T> cond = style;
  if (config_.supervised()) {
    if (static_cast<int>(labels.size()) != style.n()) raise(ErrorCode::ShapeMismatch, "one label per clip");
    for (int l : labels)
      if (l < 0 || l >= config_.n_labels) raise(ErrorCode::OutOfRange, "style label out of range");
    cond = nn::concat_channels(cond, nn::embedding(g_embedding_, labels));
  }
  return nn::leaky_relu(g_fc_(cond), T(kSlope));
}

template <typename T>
Var<T> StylizerNet<T>::generate(const Var<T>& content, const Var<T>& style,
                                std::span<const int> labels) const {
  if (config_.supervised() == labels.empty())
    raise(ErrorCode::ModeMismatch, config_.supervised() ? "supervised generator needs labels"
                                                        : "unsupervised generator takes no labels");
  if (content.c() != config_.content_dim) raise(ErrorCode::DimMismatch, "generator: content width mismatch");
  if (style.n() != content.n()) raise(ErrorCode::ShapeMismatch, "generator: batch mismatch");
  const auto m = condition(style, labels);
  const T eps = static_cast<T>(kNormEps);
  Var<T> h = content;
  const int layers = static_cast<int>(g_convs_.size());
  for (int l = 0; l < layers; ++l) {
    h = g_convs_[l](h);
    if (l + 1 == layers) break;  // output head: no normalization
    h = nn::leaky_relu(nn::adain(h, g_gamma_[l](m), g_beta_[l](m), eps), T(kSlope));
    if (l == 0) h = nn::upsample(h, 2);
  }
  return h;
}

template class StylizerNet<float>;
template class StylizerNet<double>;

Tensor<float> adain(const Tensor<float>& x, const Tensor<float>& gamma, const Tensor<float>& beta) {
  if (gamma.n() != x.n() || beta.n() != x.n() || gamma.c() != x.c() || beta.c() != x.c() ||
      gamma.t() != 1 || beta.t() != 1)
    raise(ErrorCode::ShapeMismatch, "adain: style parameters must be [batch, 1, channels]");
  nn::NoGradGuard guard;
  return nn::adain(nn::constant(x), nn::constant(gamma), nn::constant(beta), 0.0f).value();
}

Stylizer::Stylizer(const StylizerConfig& config, std::uint64_t seed) : net_(config, seed) {}

ContentCode Stylizer::encode_content(const codec::MotionCode& code) const {
  nn::NoGradGuard guard;
  return {net_.encode_content(nn::constant(code.values)).code.value()};
}

StyleDistribution Stylizer::encode_style(const codec::MotionCode& code, std::optional<int> label) const {
  nn::NoGradGuard guard;
  std::vector<int> labels;
  if (label) labels.push_back(*label);
  const auto d = net_.encode_style(nn::constant(code.values), labels);
  StyleDistribution out;
  out.mu = Eigen::Map<const Eigen::VectorXf>(d.mu.value().data(), d.mu.c());
  out.logvar = Eigen::Map<const Eigen::VectorXf>(d.logvar.value().data(), d.logvar.c());
  return out;
}

StyleCode Stylizer::sample_style(const StyleDistribution& dist, std::uint64_t seed) const {
  if (config().ablations.no_prob_style) return {dist.mu, StyleProvenance::Encoded};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  StyleCode out{dist.mu, StyleProvenance::Sampled};
  const Eigen::VectorXf sigma = dist.sigma();
  for (Eigen::Index i = 0; i < out.values.size(); ++i)
    out.values[i] += sigma[i] * static_cast<float>(normal(rng));
  return out;
}

StyleCode Stylizer::sample_prior(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  StyleCode out{Eigen::VectorXf(config().style_dim), StyleProvenance::SampledPrior};
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values[i] = static_cast<float>(normal(rng));
  return out;
}

Tensor<float> Stylizer::generate(const ContentCode& content, const StyleCode& style,
                                 std::optional<int> label) const {
  if (style.values.size() != config().style_dim) raise(ErrorCode::DimMismatch, "style code width mismatch");
  nn::NoGradGuard guard;
  Tensor<float> s(1, 1, config().style_dim);
  for (int i = 0; i < config().style_dim; ++i) s[i] = style.values[i];
  std::vector<int> labels;
  if (label) labels.push_back(*label);
  return net_.generate(nn::constant(content.values), nn::constant(std::move(s)), labels).value();
}

void Stylizer::save(const std::filesystem::path& dir, const std::string& provenance_json) const {
  nn::TensorMap tensors;
  net_.params().export_to(tensors);
  const auto& c = config();
  json meta = {{"config",
                {{"mode", to_string(c.mode)},
                 {"n_labels", c.n_labels},
                 {"code_dim", c.code_dim},
                 {"content_dim", c.content_dim},
                 {"style_dim", c.style_dim},
                 {"hidden", c.hidden},
                 {"label_embedding", c.label_embedding},
                 {"generator_layers", c.generator_layers},
                 {"ablations", ablations_json(c.ablations)}}},
               {"provenance", json::parse(provenance_json)}};
  checkpoint::save(dir, "stylizer", meta, tensors);
}

Stylizer Stylizer::load(const std::filesystem::path& dir) {
  const json meta = checkpoint::load_meta(dir, "stylizer");
  const auto& j = meta.at("config");
  StylizerConfig c;
  c.mode = mode_from_string(j.at("mode"));
  c.n_labels = j.at("n_labels");
  c.code_dim = j.at("code_dim");
  c.content_dim = j.at("content_dim");
  c.style_dim = j.at("style_dim");
  c.hidden = j.at("hidden");
  c.label_embedding = j.at("label_embedding");
  c.generator_layers = j.at("generator_layers");
  c.ablations = ablations_from_json(j.at("ablations"));
  Stylizer s(c, 0);
  s.net_.params().import_from(checkpoint::load_tensors(dir, "stylizer"));
  return s;
}

}  // namespace motionstyle::stylizer
