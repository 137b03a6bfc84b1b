#include "motionstyle/train/trainer.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/window.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace motionstyle::train {

using nn::Tensor;
using nn::Var;
using stylizer::Mode;

LossWeights LossWeights::defaults(Mode mode) {
  if (mode == Mode::Supervised) return {1.0, 0.1, 0.1};
  return {0.1, 1.0, 0.01};
}

void LossWeights::validate() const {
  if (hsa < 0 || cyc < 0 || kl < 0) raise(ErrorCode::OutOfRange, "loss weights must be non-negative");
}

Triplet sample_triplet(std::span<const motion::PoseSequence> dataset, int length, std::mt19937_64& rng) {
  const int n = static_cast<int>(dataset.size());
  if (n < 2) raise(ErrorCode::DatasetTooSmall, "triplet sampling needs at least two sequences");
  std::uniform_int_distribution<int> first(0, n - 1);
  std::uniform_int_distribution<int> other(0, n - 2);
  Triplet t;
  t.seq12 = first(rng);
  t.seq3 = other(rng);
  if (t.seq3 >= t.seq12) ++t.seq3;
  const auto& a = dataset[t.seq12];
  const auto& b = dataset[t.seq3];
  if (a.frame_count() < length || b.frame_count() < length)
    raise(ErrorCode::TooShort, "triplet sampling: sequence shorter than the window");
  const auto [s1, s2] = motion::homo_pair_starts(a.frame_count(), length, rng);
  std::uniform_int_distribution<int> start3(0, b.frame_count() - length);
  t.p1 = a.frames.middleRows(s1, length);
  t.p2 = a.frames.middleRows(s2, length);
  t.p3 = b.frames.middleRows(start3(rng), length);
  return t;
}

double kl_gaussians(const stylizer::StyleDistribution& a, const stylizer::StyleDistribution& b) {
  if (a.mu.size() != b.mu.size() || a.logvar.size() != a.mu.size() || b.logvar.size() != b.mu.size())
    raise(ErrorCode::DimMismatch, "kl_gaussians: dimension mismatch");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < a.mu.size(); ++i) {
    const double lv1 = a.logvar[i], lv2 = b.logvar[i];
    const double d = static_cast<double>(a.mu[i]) - b.mu[i];
    kl += 0.5 * (lv2 - lv1 + (std::exp(lv1) + d * d) / std::exp(lv2) - 1.0);
  }
  return kl;
}

std::array<double, 4> effective_weights(const LossWeights& w, const stylizer::Ablations& a) {
  return {a.no_autoencoding ? 0.0 : 1.0, a.no_homo_style ? 0.0 : w.hsa, a.no_cycle ? 0.0 : w.cyc, w.kl};
}

namespace {

template <typename T>
Var<T> scalar_zero() {
  return nn::constant(Tensor<T>::scalar(T(0)));
}

// Runs `fn` without recording when `weight` is zero, so terms that are only
// monitored cost no backward pass.
template <typename T, typename Fn>
Var<T> maybe_detached(double weight, Fn&& fn) {
  if (weight == 0.0) {
    nn::NoGradGuard guard;
    return nn::constant(fn().value());
  }
  return fn();
}

template <typename T>
bool finite_grads(const nn::ParameterStore<T>& store) {
  for (const auto& [name, v] : store.entries()) {
    const auto& g = v.grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(static_cast<double>(g[i]))) return false;
  }
  return true;
}

}  // namespace

template <typename T>
Objective<T> compute_losses(const Var<T>& p1, const Var<T>& p2, const Var<T>& p3,
                            std::span<const int> labels12, std::span<const int> labels3,
                            const stylizer::StylizerNet<T>& model, const codec::CodecNet<T>& codec,
                            const LossWeights& weights, std::uint64_t seed) {
  const auto& cfg = model.config();
  const auto& abl = cfg.ablations;
  if (codec.config().latent_dim != cfg.code_dim)
    raise(ErrorCode::DimMismatch, "stylizer code width differs from the codec latent width");
  const auto w = effective_weights(weights, abl);
  std::mt19937_64 rng(seed);

  const Var<T> z1 = codec.encode(p1).z;
  const Var<T> z2 = codec.encode(p2).z;
  const Var<T> z3 = codec.encode(p3).z;

  const auto c1 = model.encode_content(z1, &rng);
  const auto c2 = model.encode_content(z2, &rng);
  const auto c3 = model.encode_content(z3, &rng);
  const auto n1 = model.encode_style(z1, labels12);
  const auto n2 = model.encode_style(z2, labels12);
  const auto n3 = model.encode_style(z3, labels3);
  const auto s1 = model.sample(n1, &rng);
  const auto s2 = model.sample(n2, &rng);
  const auto s3 = model.sample(n3, &rng);

  auto recon_pair = [&](const Var<T>& z_hat, const Var<T>& z, const Var<T>& p) {
    return nn::add(nn::l1_loss(z_hat, z), nn::l1_loss(codec.decode(z_hat), p));
  };

  // Reconstruction of clips 1 and 2 through their own content and style.
  const Var<T> l_rec = maybe_detached<T>(w[0], [&] {
    const auto z1_hat = model.generate(c1.code, s1, labels12);
    const auto z2_hat = model.generate(c2.code, s2, labels12);
    return nn::add(recon_pair(z1_hat, z1, p1), recon_pair(z2_hat, z2, p2));
  });

  const Var<T> l_hsa = maybe_detached<T>(w[1], [&] { return nn::kl_diag(n1.mu, n1.logvar, n2.mu, n2.logvar, true); });

  // Content of 2 with the style of 3, then swap back.
  const auto zt = model.generate(c2.code, s3, labels3);
  const auto nt = model.encode_style(zt, labels3);
  const auto st = model.sample(nt, &rng);
  const Var<T> l_cyc = maybe_detached<T>(w[2], [&] {
    const auto ct = model.encode_content(zt, &rng);
    const auto z2_cyc = model.generate(ct.code, s2, labels12);
    const auto z3_cyc = model.generate(c3.code, st, labels3);
    return nn::add(recon_pair(z2_cyc, z2, p2), recon_pair(z3_cyc, z3, p3));
  });

  std::vector<Var<T>> kl_terms;
  for (const auto* d : {&n1, &n2, &n3, &nt}) kl_terms.push_back(nn::kl_standard(d->mu, d->logvar, true));
  if (abl.prob_content)
    for (const auto* c : {&c1, &c2, &c3}) kl_terms.push_back(nn::kl_standard(c->mu, c->logvar, true));
  Var<T> l_kl = kl_terms[0];
  for (std::size_t i = 1; i < kl_terms.size(); ++i) l_kl = nn::add(l_kl, kl_terms[i]);

  Objective<T> out;
  std::vector<Var<T>> terms;
  std::vector<T> ws;
  for (int i = 0; i < 4; ++i) {
    const Var<T>& term = i == 0 ? l_rec : i == 1 ? l_hsa : i == 2 ? l_cyc : l_kl;
    if (w[i] == 0.0) continue;
    terms.push_back(term);
    ws.push_back(static_cast<T>(w[i]));
  }
  out.total = terms.empty() ? scalar_zero<T>() : nn::weighted_sum(terms, ws);
  auto& r = out.report;
  r.rec = l_rec.item();
  r.hsa = l_hsa.item();
  r.cyc = l_cyc.item();
  r.kl = l_kl.item();
  r.total = w[0] * r.rec + w[1] * r.hsa + w[2] * r.cyc + w[3] * r.kl;
  r.kl_terms = 4;
  if (!std::isfinite(r.total)) raise(ErrorCode::NonFiniteLoss, "stylizer objective is not finite");
  return out;
}

template Objective<float> compute_losses<float>(const Var<float>&, const Var<float>&, const Var<float>&,
                                                std::span<const int>, std::span<const int>,
                                                const stylizer::StylizerNet<float>&,
                                                const codec::CodecNet<float>&, const LossWeights&,
                                                std::uint64_t);
template Objective<double> compute_losses<double>(const Var<double>&, const Var<double>&, const Var<double>&,
                                                  std::span<const int>, std::span<const int>,
                                                  const stylizer::StylizerNet<double>&,
                                                  const codec::CodecNet<double>&, const LossWeights&,
                                                  std::uint64_t);

codec::Codec identity_codec(int feature_dim, int latent_dim) {
  codec::CodecConfig c;
  c.variant = codec::Variant::None;
  c.feature_dim = feature_dim;
  c.latent_dim = latent_dim;
  c.hidden = 1;
  return codec::Codec(c, 0);
}

TrainResult train_stylizer(const codec::Codec* pretrained, std::span<const motion::PoseSequence> dataset,
                           const TrainConfig& config) {
  const auto& abl = config.model.ablations;
  config.weights.validate();
  if (dataset.size() < 2) raise(ErrorCode::DatasetTooSmall, "stylizer training needs at least two sequences");
  for (const auto& c : dataset)
    if (!c.normalized) raise(ErrorCode::NotNormalized, "stylizer training expects normalized clips");
  const int feature_dim = dataset[0].feature_dim();

  std::optional<codec::Codec> codec;
  if (abl.no_latent) {
    codec.emplace(identity_codec(feature_dim, config.model.code_dim));
  } else if (abl.end_to_end) {
    codec::CodecConfig cc = pretrained ? pretrained->config() : codec::CodecConfig{};
    cc.feature_dim = feature_dim;
    cc.latent_dim = config.model.code_dim;
    codec.emplace(cc, config.init_seed ^ 0xc0dec);
  } else {
    if (!pretrained) raise(ErrorCode::MissingCodec, "stylizer training needs a pretrained codec");
    codec.emplace(*pretrained);
  }
  if (codec->config().latent_dim != config.model.code_dim)
    raise(ErrorCode::DimMismatch, "stylizer code_dim must equal the codec latent width");
  codec->net().params().set_trainable(abl.end_to_end);

  const bool supervised = config.model.supervised();
  std::vector<int> labels(dataset.size(), 0);
  if (supervised)
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (!dataset[i].style_label) raise(ErrorCode::LabelRequired, "supervised training needs style labels");
      labels[i] = *dataset[i].style_label;
    }

  TrainResult result{stylizer::Stylizer(config.model, config.init_seed), std::move(*codec), {}, 0};
  auto& model = result.model.net();
  auto& cnet = result.codec.net();
  const auto& sched = config.schedule;
  nn::Adam<float> adam(sched.adam);
  adam.attach(model.params());
  if (abl.end_to_end) adam.attach(cnet.params());

  std::ofstream csv;
  if (config.curves_csv) {
    if (config.curves_csv->has_parent_path()) std::filesystem::create_directories(config.curves_csv->parent_path());
    csv.open(*config.curves_csv);
    if (!csv) raise(ErrorCode::IoError, "cannot write " + config.curves_csv->string());
    csv << "step,L_rec,L_hsa,L_cyc,L_kl,total\n";
  }

  std::mt19937_64 rng(sched.seed);
  const int window = sched.window / 8 * 8;
  double smoothed = 0.0, best = 0.0;
  int since_best = 0;
  for (int step = 0; step < sched.steps; ++step) {
    std::vector<motion::FrameMatrix> b1, b2, b3;
    std::vector<int> l12, l3;
    for (int i = 0; i < sched.batch; ++i) {
      auto t = sample_triplet(dataset, window, rng);
      b1.push_back(std::move(t.p1));
      b2.push_back(std::move(t.p2));
      b3.push_back(std::move(t.p3));
      if (supervised) {
        l12.push_back(labels[t.seq12]);
        l3.push_back(labels[t.seq3]);
      }
    }
    const auto p1 = nn::constant(motion::stack<float>(b1));
    const auto p2 = nn::constant(motion::stack<float>(b2));
    const auto p3 = nn::constant(motion::stack<float>(b3));
    Objective<float> obj;
    try {
      obj = compute_losses<float>(p1, p2, p3, l12, l3, model, cnet, config.weights, rng());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteLoss) raise(ErrorCode::Diverged, e.what());
      throw;
    }
    adam.zero_grad();
    if (obj.total.requires_grad()) nn::backward(obj.total);
    obj.report.grads_finite = finite_grads(model.params());
    if (!obj.report.grads_finite) raise(ErrorCode::Diverged, "non-finite stylizer gradient");
    adam.step();
    result.steps_run = step + 1;

    const auto& r = obj.report;
    smoothed = step == 0 ? r.total : 0.98 * smoothed + 0.02 * r.total;
    if (csv.is_open()) csv << step << ',' << r.rec << ',' << r.hsa << ',' << r.cyc << ',' << r.kl << ',' << r.total << '\n';
    if (step % std::max(1, sched.log_every) == 0 || step + 1 == sched.steps) {
      result.curve.emplace_back(step, r);
      if (sched.log) {
        std::ostringstream msg;
        msg << "stylizer step " << step << " rec " << r.rec << " hsa " << r.hsa << " cyc " << r.cyc << " kl "
            << r.kl << " total " << r.total;
        sched.log(msg.str());
      }
    }
    if (config.plateau_patience > 0 && step >= sched.adam.warmup_steps) {
      if (since_best == 0 && best == 0.0) best = smoothed;
      if (smoothed < best * 0.995) {
        best = smoothed;
        since_best = 0;
      } else if (++since_best >= config.plateau_patience) {
        break;
      }
    }
  }
  result.codec.net().params().set_trainable(false);
  return result;
}

}  // namespace motionstyle::train
