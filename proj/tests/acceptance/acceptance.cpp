// End-to-end acceptance run: one PASS/FAIL line per criterion.
//
//   motionstyle_acceptance [work_dir]
//
// Criteria 4-6 and 8 train a full desk-scale pipeline from a freshly
// generated corpus (about 15 minutes on one core).

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/error.hpp"
#include "motionstyle/eval/classifier.hpp"
#include "motionstyle/eval/metrics.hpp"
#include "motionstyle/eval/protocol.hpp"
#include "motionstyle/gmp/gmp.hpp"
#include "motionstyle/infer/pipeline.hpp"
#include "motionstyle/motion/augment.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/rotation.hpp"
#include "motionstyle/nn/ops.hpp"
#include "motionstyle/stylizer/stylizer.hpp"
#include "motionstyle/synth/corpus.hpp"
#include "motionstyle/train/trainer.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace motionstyle;

namespace {

// Tolerances and thresholds.
constexpr double kSixdRoundTrip = 1e-6;
constexpr double kGeodesicOracle = 1e-6;
constexpr double kKlMonteCarloRel = 0.01;
constexpr int kKlSamples = 1'000'000;
constexpr double kFidClosedFormRel = 0.05;
constexpr int kFidSamples = 10'000;
constexpr double kNormStats = 1e-5;
constexpr double kGradRel = 1e-3;
constexpr int kGradParams = 25;
constexpr double kStyleAcc = 0.85;
constexpr double kContentAcc = 0.80;
constexpr double kLabelAcc = 0.85;
constexpr double kUnsupStyleAcc = 0.75;
constexpr double kHomoRatio = 0.5;
constexpr double kCiScaleTol = 0.30;
constexpr int kRepeats = 30;
constexpr int kRepeatsLarge = 120;

// Desk-scale training settings.
constexpr int kCodecSteps = 1500;
constexpr int kGmpSteps = 2000;
constexpr int kClassifierSteps = 600;
constexpr int kStylizerSteps = 1500;
constexpr int kDeskDim = 64;
constexpr int kDeskHidden = 128;
constexpr double kSupervisedKl = 0.3;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [fail]");
  }
};

int failures = 0;

void report(int id, const std::string& name, Outcome& o) {
  if (!o.pass) ++failures;
  std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << name << ": " << o.detail.str()
            << std::endl;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

void log_line(const std::string& s) { std::cerr << "  " << s << "\n"; }

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

motion::PoseSequence random_rotation_clip(const std::vector<Eigen::Quaterniond>& qs, int frames) {
  motion::PoseSequence seq;
  seq.skeleton = motion::default_skeleton();
  const auto layout = seq.layout();
  seq.frames = motion::FrameMatrix::Zero(frames, layout.dim());
  for (int t = 0; t < frames; ++t)
    for (int j = 0; j < layout.joints; ++j) {
      const auto r = motion::matrix_to_sixd(qs[static_cast<std::size_t>(t * layout.joints + j)].toRotationMatrix());
      for (int k = 0; k < 6; ++k) seq.frames(t, layout.rotations() + 6 * j + k) = static_cast<float>(r[k]);
    }
  return seq;
}

void criterion_math() {
  Outcome o;
  std::mt19937_64 rng(11);

  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix3d R = random_rotation(rng);
    worst = std::max(worst, (motion::sixd_to_matrix(motion::matrix_to_sixd(R)) - R).cwiseAbs().maxCoeff());
  }
  o.check(worst < kSixdRoundTrip, "6D round trip " + fmt(worst));

  // Geodesic distance against quaternion angles 2 acos |<q1, q2>| of the
  // double-precision quaternions the clips were built from (channels are
  // stored as float, hence the 1e-6 budget).
  const int frames = 8, joints = 21;
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Eigen::Quaterniond> qa, qb;
  for (int i = 0; i < frames * joints; ++i) {
    qa.push_back(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized());
    qb.push_back(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized());
  }
  const auto a = random_rotation_clip(qa, frames), b = random_rotation_clip(qb, frames);
  double oracle = 0.0;
  for (std::size_t i = 0; i < qa.size(); ++i) oracle += 2.0 * std::acos(std::min(1.0, std::abs(qa[i].dot(qb[i]))));
  oracle /= frames * joints;
  const double geo_err = std::abs(eval::geodesic_distance(a, b) - oracle);
  o.check(geo_err < kGeodesicOracle, "geodesic vs quaternion " + fmt(geo_err, 3));

  // KL of diagonal Gaussians against a Monte-Carlo estimate.
  stylizer::StyleDistribution p, q;
  p.mu.resize(8), p.logvar.resize(8), q.mu.resize(8), q.logvar.resize(8);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int i = 0; i < 8; ++i) p.mu[i] = u(rng), p.logvar[i] = 0.5f * u(rng), q.mu[i] = u(rng), q.logvar[i] = 0.5f * u(rng);
  const double kl = train::kl_gaussians(p, q);
  double mc = 0.0;
  for (int s = 0; s < kKlSamples; ++s) {
    double lp = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double sp = std::exp(0.5 * p.logvar[i]), sq = std::exp(0.5 * q.logvar[i]);
      const double x = p.mu[i] + sp * n(rng);
      lp += -std::log(sp) - 0.5 * std::pow((x - p.mu[i]) / sp, 2) + std::log(sq) + 0.5 * std::pow((x - q.mu[i]) / sq, 2);
    }
    mc += lp;
  }
  mc /= kKlSamples;
  const double kl_rel = std::abs(kl - mc) / kl;
  o.check(kl_rel < kKlMonteCarloRel, "KL " + fmt(kl) + " vs MC " + fmt(mc) + " rel " + fmt(kl_rel, 3));

  // FID on samples of two known diagonal Gaussians:
  // |mu_a - mu_b|^2 + sum (sigma_a - sigma_b)^2.
  const int d = 6;
  Eigen::VectorXd mua(d), mub(d), sa(d), sb(d);
  for (int i = 0; i < d; ++i) mua[i] = 0.0, mub[i] = 0.5 * (i % 3), sa[i] = 1.0 + 0.2 * i, sb[i] = 0.5 + 0.1 * i;
  Eigen::MatrixXd xa(kFidSamples, d), xb(kFidSamples, d);
  for (int r = 0; r < kFidSamples; ++r)
    for (int i = 0; i < d; ++i) xa(r, i) = mua[i] + sa[i] * n(rng), xb(r, i) = mub[i] + sb[i] * n(rng);
  const double closed = (mua - mub).squaredNorm() + (sa - sb).squaredNorm();
  const double f = eval::fid(xa, xb);
  const double fid_rel = std::abs(f - closed) / closed;
  o.check(fid_rel < kFidClosedFormRel, "FID " + fmt(f) + " vs " + fmt(closed) + " rel " + fmt(fid_rel, 3));

  // Instance and adaptive instance normalization statistics.
  nn::Tensor<double> x(2, 50, 5), gamma(2, 1, 5), beta(2, 1, 5);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 3.0 + 2.0 * n(rng);
  for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = 0.5 + std::abs(n(rng)), beta[i] = n(rng);
  const auto in = nn::instance_norm(nn::constant(x), 1e-12).value();
  const auto ad = nn::adain(nn::constant(x), nn::constant(gamma), nn::constant(beta), 1e-12).value();
  double stat_err = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 5; ++c) {
      double m_in = 0, v_in = 0, m_ad = 0, v_ad = 0;
      for (int t = 0; t < 50; ++t) m_in += in.at(b, t, c), m_ad += ad.at(b, t, c);
      m_in /= 50, m_ad /= 50;
      for (int t = 0; t < 50; ++t) v_in += std::pow(in.at(b, t, c) - m_in, 2), v_ad += std::pow(ad.at(b, t, c) - m_ad, 2);
      v_in /= 50, v_ad /= 50;
      stat_err = std::max({stat_err, std::abs(m_in), std::abs(v_in - 1.0), std::abs(m_ad - beta.at(b, 0, c)),
                           std::abs(std::sqrt(v_ad) - gamma.at(b, 0, c))});
    }
  o.check(stat_err < kNormStats, "IN/AdaIN statistics " + fmt(stat_err));
  report(1, "math oracles", o);
}

// ---------------------------------------------------------------- criterion 2

nn::Tensor<double> gradcheck_tensor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nn::Tensor<double> x(2, 16, 7);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng);
  return x;
}

double objective_grad_error(stylizer::Mode mode, std::uint64_t seed) {
  stylizer::StylizerConfig sc;
  sc.mode = mode;
  sc.code_dim = 6, sc.content_dim = 5, sc.style_dim = 4, sc.hidden = 6, sc.label_embedding = 3;
  sc.generator_layers = 3;
  codec::CodecConfig cc;
  cc.feature_dim = 7, cc.latent_dim = 6, cc.hidden = 5;
  codec::CodecNet<double> codec(cc, seed);
  codec.params().set_trainable(false);
  stylizer::StylizerNet<double> model(sc, seed + 1);
  std::mt19937_64 rng(seed + 2);
  auto clip = [&] { return nn::constant(gradcheck_tensor(rng)); };
  const auto p1 = clip(), p2 = clip(), p3 = clip();
  std::vector<int> l12 = {1, 2}, l3 = {0, 3};
  if (mode == stylizer::Mode::Unsupervised) l12.clear(), l3.clear();
  const auto weights = train::LossWeights::defaults(mode);
  auto eval_total = [&] { return train::compute_losses<double>(p1, p2, p3, l12, l3, model, codec, weights, 99); };

  auto& entries = model.params().entries();
  for (auto& [name, v] : entries) v.zero_grad();
  auto obj = eval_total();
  nn::backward(obj.total);
  // Sample parameter entries across tensors.
  std::uniform_int_distribution<std::size_t> pick_tensor(0, entries.size() - 1);
  double worst = 0.0;
  const double h = 1e-6;
  for (int s = 0; s < kGradParams; ++s) {
    auto& v = entries[pick_tensor(rng)].second;
    std::uniform_int_distribution<std::size_t> pick(0, v.value().size() - 1);
    const std::size_t i = pick(rng);
    const double analytic = v.grad().empty() ? 0.0 : v.grad()[i];
    auto& w = v.mutable_value();
    const double saved = w[i];
    w[i] = saved + h;
    const double up = eval_total().report.total;
    w[i] = saved - h;
    const double down = eval_total().report.total;
    w[i] = saved;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
  }
  return worst;
}

void criterion_gradients() {
  Outcome o;
  const double sup = objective_grad_error(stylizer::Mode::Supervised, 5);
  const double uns = objective_grad_error(stylizer::Mode::Unsupervised, 6);
  o.check(sup < kGradRel, "supervised worst rel " + fmt(sup, 3) + " over " + std::to_string(kGradParams) + " params");
  o.check(uns < kGradRel, "unsupervised worst rel " + fmt(uns, 3));
  report(2, "objective gradient vs finite differences", o);
}

// ---------------------------------------------------------------- criterion 3

std::vector<motion::PoseSequence> small_corpus(int clips_per_cell, int length) {
  synth::CorpusSpec spec;
  spec.clips_per_cell = clips_per_cell;
  spec.length = length;
  spec.seed = 3;
  return synth::generate_split(synth::plan_corpus(spec), synth::Split::Train);
}

void criterion_shapes() {
  Outcome o;
  const auto clips = small_corpus(2, 500);
  std::vector<motion::PoseSequence> both = clips;
  for (const auto& c : clips) both.push_back(motion::mirror(c));
  const auto stats = motion::fit_norm_stats(both);

  codec::Codec codec(codec::CodecConfig{}, 1);
  auto clip160 = motion::znormalize(clips[0], stats);
  clip160.frames = clip160.frames.topRows(160).eval();
  const auto code = codec.encode(clip160);
  o.check(code.steps() == 40 && code.dim() == 512, "codec 160 -> " + std::to_string(code.steps()) + "x" +
                                                       std::to_string(code.dim()));

  stylizer::Stylizer sty(stylizer::StylizerConfig{}, 2);
  const auto content = sty.encode_content(code);
  const auto style = sty.encode_style(code, 0);
  o.check(content.values.c() == 512 && style.mu.size() == 512,
          "content dim " + std::to_string(content.values.c()) + ", style dim " + std::to_string(style.mu.size()));

  // Frozen codec: a short stylizer run leaves every codec weight bit-identical.
  codec::CodecConfig small;
  small.latent_dim = 16, small.hidden = 16;
  codec::Codec frozen(small, 3);
  nn::TensorMap before, after;
  frozen.net().params().export_to(before);
  std::vector<motion::PoseSequence> normed;
  for (const auto& c : clips) normed.push_back(motion::znormalize(c, stats));
  train::TrainConfig tc;
  tc.model.code_dim = 16, tc.model.content_dim = 8, tc.model.style_dim = 8, tc.model.hidden = 16;
  tc.schedule.steps = 5, tc.schedule.batch = 2, tc.schedule.window = 32;
  const auto result = train::train_stylizer(&frozen, normed, tc);
  frozen.net().params().export_to(after);
  bool identical = true;
  for (const auto& [name, t] : before)
    for (std::size_t i = 0; i < t.size(); ++i) identical = identical && t[i] == after.at(name)[i];
  o.check(identical, "codec bit-identical after stylizer training");

  infer::ModelBundle bundle{stats, frozen, result.model, std::nullopt};
  std::string lengths;
  bool lengths_ok = true;
  for (int len : {37, 160, 500}) {
    auto c = clips[1];
    c.frames = c.frames.topRows(len).eval();
    const auto out = infer::stylize_motion_based(c, clips[2], clips[2].style_label, bundle);
    lengths_ok = lengths_ok && out.frame_count() == len;
    lengths += (lengths.empty() ? "" : ",") + std::to_string(len) + "->" + std::to_string(out.frame_count());
  }
  o.check(lengths_ok, "lengths " + lengths);
  report(3, "shape and structure contracts", o);
}

// ------------------------------------------------------------ criteria 4 to 8

struct Pipeline {
  motion::NormStats stats;
  std::vector<motion::PoseSequence> train_raw, test_raw, train_norm, train_aug;
  std::optional<codec::Codec> codec;
  std::optional<gmp::GlobalMotionPredictor> gmp;
  std::optional<eval::Classifier> style_clf, content_clf;
};

train::Schedule desk_schedule(int steps) {
  train::Schedule s;
  s.steps = steps;
  s.batch = 16;
  s.window = 64;
  s.adam.lr = 1e-3;
  s.log_every = 500;
  s.log = log_line;
  return s;
}

struct Trained {
  infer::ModelBundle bundle;
  double seconds = 0.0;
};

Trained train_variant(Pipeline& p, stylizer::Mode mode, const std::string& ablation) {
  train::TrainConfig tc;
  tc.model.mode = mode;
  tc.model.code_dim = kDeskDim, tc.model.content_dim = kDeskDim, tc.model.style_dim = kDeskDim;
  tc.model.hidden = kDeskHidden;
  tc.model.ablations.no_homo_style = ablation == "no_homo_style";
  tc.model.ablations.end_to_end = ablation == "end_to_end";
  tc.weights = train::LossWeights::defaults(mode);
  if (mode == stylizer::Mode::Supervised) tc.weights.kl = kSupervisedKl;
  tc.schedule = desk_schedule(kStylizerSteps);
  tc.schedule.seed = 21;
  tc.init_seed = 22;
  std::cerr << "training " << to_string(mode) << " stylizer" << (ablation.empty() ? "" : " (" + ablation + ")") << "\n";
  const auto t0 = std::chrono::steady_clock::now();
  auto result = train::train_stylizer(&*p.codec, p.train_norm, tc);
  return {infer::ModelBundle{p.stats, result.codec, result.model, p.gmp}, elapsed_s(t0)};
}

eval::MetricReport run_protocol(const Pipeline& p, const infer::ModelBundle& bundle, int repeats, bool use_gmp = true) {
  eval::ProtocolOptions po;
  po.repeats = repeats;
  po.seed = 5;
  po.stylize.use_gmp = use_gmp;
  return eval::evaluate_protocol(bundle, *p.style_clf, *p.content_clf, p.test_raw, p.test_raw, po);
}

double homo_ratio(const Pipeline& p, const infer::ModelBundle& b) {
  const bool supervised = b.stylizer.config().mode == stylizer::Mode::Supervised;
  std::vector<stylizer::StyleDistribution> first, second;
  std::vector<int> labels;
  for (const auto& c : p.test_raw) {
    const auto n = motion::znormalize(c, b.stats);
    auto w1 = n, w2 = n;
    w1.frames = n.frames.topRows(64).eval();
    w2.frames = n.frames.middleRows(n.frame_count() - 64, 64).eval();
    std::optional<int> label;
    if (supervised) label = c.style_label;
    first.push_back(b.stylizer.encode_style(b.codec.encode(w1), label));
    second.push_back(b.stylizer.encode_style(b.codec.encode(w2), label));
    labels.push_back(*c.style_label);
  }
  double same = 0.0, cross = 0.0;
  int n_cross = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    same += train::kl_gaussians(first[i], second[i]);
    for (std::size_t j = 0; j < first.size(); ++j)
      if (labels[i] != labels[j]) cross += train::kl_gaussians(first[i], first[j]), ++n_cross;
  }
  return (same / static_cast<double>(first.size())) / (cross / n_cross);
}

void criteria_pipeline(const fs::path& work, Outcome& latency) {
  Pipeline p;
  auto t0 = std::chrono::steady_clock::now();
  synth::CorpusSpec spec;  // 4 x 4 x 25 clips of 160 frames
  const auto manifest = synth::generate_corpus(spec, work / "corpus");
  p.train_raw = synth::load_split(work / "corpus", manifest, synth::Split::Train);
  p.test_raw = synth::load_split(work / "corpus", manifest, synth::Split::Test);
  for (const auto& c : p.train_raw) p.train_aug.push_back(c), p.train_aug.push_back(motion::mirror(c));
  p.stats = motion::fit_norm_stats(p.train_aug);
  for (auto& c : p.train_aug) c = motion::znormalize(c, p.stats);
  for (const auto& c : p.train_raw) p.train_norm.push_back(motion::znormalize(c, p.stats));
  std::vector<motion::PoseSequence> test_norm;
  for (const auto& c : p.test_raw) test_norm.push_back(motion::znormalize(c, p.stats));
  std::cerr << "corpus: " << p.train_raw.size() << " train, " << p.test_raw.size() << " test clips\n";

  double training_s = 0.0;
  auto t = std::chrono::steady_clock::now();
  codec::CodecConfig cc;
  cc.latent_dim = kDeskDim, cc.hidden = kDeskHidden;
  p.codec.emplace(cc, 1);
  std::cerr << "training codec\n";
  const auto codec_report = codec::train_codec(*p.codec, p.train_aug, test_norm, p.stats, desk_schedule(kCodecSteps));
  gmp::GmpConfig gc;
  gc.hidden = kDeskHidden;
  p.gmp.emplace(gc, 1);
  std::cerr << "training global-motion predictor\n";
  const auto gmp_report = gmp::train_gmp(*p.gmp, p.train_aug, test_norm, p.stats, desk_schedule(kGmpSteps));
  training_s += elapsed_s(t);

  std::string clf_detail;
  for (auto target : {eval::Target::Style, eval::Target::Content}) {
    eval::ClassifierConfig cfg;
    cfg.target = target;
    eval::Classifier clf(cfg, 3);
    auto s = desk_schedule(kClassifierSteps);
    s.window = 96;
    s.adam.warmup_steps = 50;
    const auto r = eval::train_classifier(clf, p.train_aug, test_norm, s);
    clf_detail += eval::to_string(target) + " oracle held-out " + fmt(r.heldout_accuracy, 3) + "; ";
    (target == eval::Target::Style ? p.style_clf : p.content_clf).emplace(std::move(clf));
  }

  auto sup = train_variant(p, stylizer::Mode::Supervised, "");
  auto uns = train_variant(p, stylizer::Mode::Unsupervised, "");
  auto uns_nohomo = train_variant(p, stylizer::Mode::Unsupervised, "no_homo_style");
  auto uns_e2e = train_variant(p, stylizer::Mode::Unsupervised, "end_to_end");
  training_s += sup.seconds + uns.seconds;

  // Criterion 4.
  {
    Outcome o;
    const auto rs = run_protocol(p, sup.bundle, kRepeats);
    const auto ru = run_protocol(p, uns.bundle, kRepeats);
    eval::write_report_json(rs, work / "supervised_report.json");
    eval::write_report_json(ru, work / "unsupervised_report.json");
    int hits = 0, total = 0;
    for (const auto& c : p.test_raw)
      for (int label = 0; label < 4; ++label, ++total) {
        const auto out = infer::stylize_label_based(c, label, 1000 + static_cast<std::uint64_t>(total), sup.bundle);
        hits += p.style_clf->predict(motion::znormalize(out, p.stats)) == label ? 1 : 0;
      }
    const double label_acc = static_cast<double>(hits) / total;
    o.check(rs.style_acc.mean >= kStyleAcc, "supervised style acc " + fmt(rs.style_acc.mean, 3));
    o.check(rs.content_acc.mean >= kContentAcc, "content acc " + fmt(rs.content_acc.mean, 3));
    o.check(rs.diversity.mean > 0.0, "label-based diversity " + fmt(rs.diversity.mean, 3));
    o.check(label_acc >= kLabelAcc, "label-based acc " + fmt(label_acc, 3));
    o.check(ru.style_acc.mean >= kUnsupStyleAcc, "unsupervised style acc " + fmt(ru.style_acc.mean, 3));
    o.check(training_s <= 1800.0, "codec+GMP+two stylizers trained in " + fmt(training_s, 4) + " s");
    o.detail << "; codec MPJPE " << fmt(codec_report.heldout_mpjpe_mm, 3) << " mm, GMP root error "
             << fmt(gmp_report.root_error_mm, 3) << " mm; " << clf_detail;
    report(4, "desk-scale synthetic reproduction", o);

    // Criterion 5 (unsupervised model, paired runs with identical seeds).
    Outcome a;
    const auto rh = run_protocol(p, uns_nohomo.bundle, kRepeats);
    const auto re = run_protocol(p, uns_e2e.bundle, kRepeats);
    const auto rg = run_protocol(p, uns.bundle, kRepeats, false);
    a.check(rh.content_acc.mean < ru.content_acc.mean,
            "no_homo_style content acc " + fmt(rh.content_acc.mean, 3) + " < " + fmt(ru.content_acc.mean, 3));
    a.check(re.style_acc.mean < ru.style_acc.mean,
            "end_to_end style acc " + fmt(re.style_acc.mean, 3) + " < " + fmt(ru.style_acc.mean, 3));
    a.check(rg.foot_skating.mean > ru.foot_skating.mean, "foot skating without GMP " + fmt(rg.foot_skating.mean, 3) +
                                                             " > with GMP " + fmt(ru.foot_skating.mean, 3) + " m/s");
    report(5, "ablation directions", a);

    // Criterion 6.
    Outcome h;
    const double ratio_u = homo_ratio(p, uns.bundle), ratio_s = homo_ratio(p, sup.bundle);
    h.check(ratio_u < kHomoRatio, "unsupervised same/cross KL ratio " + fmt(ratio_u, 3));
    h.check(ratio_s < kHomoRatio, "supervised ratio " + fmt(ratio_s, 3));
    report(6, "homo-style property", h);

    // Criterion 7 was measured before training, on untrained full-size models.
    report(7, "efficiency direction", latency);

    // Criterion 8.
    Outcome c;
    bool complete = true;
    for (const auto* e : {&ru.style_acc, &ru.content_acc, &ru.style_fid, &ru.content_fid, &ru.geo_dis,
                          &ru.diversity, &ru.foot_skating})
      complete = complete && e->ci95.has_value() && e->values.size() == static_cast<std::size_t>(kRepeats);
    c.check(complete && ru.repeats == kRepeats, "30-repeat report carries mean and CI for all metrics");
    const auto large = run_protocol(p, uns.bundle, kRepeatsLarge);
    const double expected = std::sqrt(static_cast<double>(kRepeatsLarge) / kRepeats);
    const double ratio = *ru.content_fid.ci95 / *large.content_fid.ci95;
    c.check(std::abs(ratio / expected - 1.0) < kCiScaleTol,
            "content FID CI 30/120 ratio " + fmt(ratio, 3) + " (expected " + fmt(expected, 3) + ")");
    report(8, "protocol machinery", c);
  }
  std::cerr << "pipeline criteria took " << fmt(elapsed_s(t0), 4) << " s\n";
}

// ---------------------------------------------------------------- criterion 7

void criterion_latency(Outcome& o) {
  const auto clips = small_corpus(1, 160);
  const auto stats = motion::fit_norm_stats(clips);
  const auto& content = clips[0];
  const auto& style = clips[5];

  infer::ModelBundle latent{stats, codec::Codec(codec::CodecConfig{}, 1), stylizer::Stylizer(stylizer::StylizerConfig{}, 2),
                            gmp::GlobalMotionPredictor(gmp::GmpConfig{}, 3)};
  stylizer::StylizerConfig raw_cfg;
  raw_cfg.ablations.no_latent = true;
  infer::ModelBundle raw{stats, train::identity_codec(260, raw_cfg.code_dim), stylizer::Stylizer(raw_cfg, 2),
                         gmp::GlobalMotionPredictor(gmp::GmpConfig{}, 3)};
  auto run = [&](const infer::ModelBundle& b) {
    return eval::benchmark_forward([&] { infer::stylize_motion_based(content, style, style.style_label, b); }, 9, 3);
  };
  const auto tl = run(latent), tr = run(raw);
  o.check(tl.median_ms < tr.median_ms, "latent " + fmt(tl.median_ms) + " ms (IQR " + fmt(tl.iqr_ms, 3) +
                                           ") < no_latent " + fmt(tr.median_ms) + " ms (IQR " + fmt(tr.iqr_ms, 3) +
                                           "), 160 frames, 512-D codes");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "motionstyle_acceptance";
  try {
    fs::remove_all(work);
    fs::create_directories(work);
    criterion_math();
    criterion_gradients();
    criterion_shapes();
    Outcome latency;
    criterion_latency(latency);
    criteria_pipeline(work, latency);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
