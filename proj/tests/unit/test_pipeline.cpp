#include "motionstyle/error.hpp"
#include "motionstyle/eval/classifier.hpp"
#include "motionstyle/eval/metrics.hpp"
#include "motionstyle/eval/protocol.hpp"
#include "motionstyle/infer/pipeline.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/rotation.hpp"
#include "motionstyle/synth/corpus.hpp"
#include "motionstyle/train/trainer.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <Eigen/Geometry>

#include <filesystem>
#include <fstream>
#include <random>

using namespace motionstyle;
namespace fs = std::filesystem;

#define EXPECT_ERROR_CODE(stmt, expected)        \
  do {                                           \
    try {                                        \
      stmt;                                      \
      ADD_FAILURE() << "no error from " #stmt;   \
    } catch (const Error& e) {                   \
      EXPECT_EQ(e.code(), expected) << e.what(); \
    }                                            \
  } while (0)

namespace {

constexpr int kCode = 16;

struct Data {
  std::vector<motion::PoseSequence> raw, norm;
  motion::NormStats stats;
};

/// One clip per (style, content) cell, labels set.
const Data& data() {
  static const Data d = [] {
    synth::CorpusSpec spec;
    spec.clips_per_cell = 1;
    spec.length = 64;
    spec.seed = 5;
    Data out;
    out.raw = synth::generate_split(synth::plan_corpus(spec), synth::Split::Train);
    out.stats = motion::fit_norm_stats(out.raw);
    for (const auto& r : out.raw) out.norm.push_back(motion::znormalize(r, out.stats));
    return out;
  }();
  return d;
}

codec::CodecConfig small_codec() {
  codec::CodecConfig cfg;
  cfg.latent_dim = kCode;
  cfg.hidden = 16;
  return cfg;
}

stylizer::StylizerConfig small_stylizer(stylizer::Mode mode) {
  stylizer::StylizerConfig cfg;
  cfg.mode = mode;
  cfg.code_dim = kCode;
  cfg.content_dim = 12;
  cfg.style_dim = 8;
  cfg.hidden = 16;
  cfg.label_embedding = 4;
  cfg.generator_layers = 2;
  return cfg;
}

infer::ModelBundle bundle(stylizer::Mode mode, bool with_gmp = true) {
  gmp::GmpConfig g;
  g.hidden = 8;
  std::optional<gmp::GlobalMotionPredictor> predictor;
  if (with_gmp) predictor.emplace(g, 3);
  return infer::ModelBundle{data().stats, codec::Codec(small_codec(), 1), stylizer::Stylizer(small_stylizer(mode), 2),
                            std::move(predictor)};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("motionstyle_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Raw sequence at rest: identity rotations, root at 1 m, no contacts.
motion::PoseSequence still_sequence(int frames) {
  motion::PoseSequence seq;
  seq.skeleton = motion::default_skeleton();
  seq.frames = motion::FrameMatrix::Zero(frames, seq.layout().dim());
  const auto identity = motion::matrix_to_sixd(Eigen::Matrix3d::Identity());
  for (int t = 0; t < frames; ++t) {
    seq.frames(t, motion::PoseLayout::kRootHeight) = 1.0f;
    for (int j = 0; j < seq.layout().joints; ++j)
      for (int k = 0; k < 6; ++k) seq.frames(t, seq.layout().rotations() + 6 * j + k) = static_cast<float>(identity[k]);
  }
  return seq;
}

void set_rotation(motion::PoseSequence& seq, int t, int joint, const Eigen::Matrix3d& R) {
  const auto r = motion::matrix_to_sixd(R);
  for (int k = 0; k < 6; ++k) seq.frames(t, seq.layout().rotations() + 6 * joint + k) = static_cast<float>(r[k]);
}

}  // namespace

// ---------------------------------------------------------------- trainer

TEST(Trainer, TripletOutsiderIsUniformOverOtherSequences) {
  // Five sequences: clip 3 is uniform given clips 1/2, and clips 1/2 are
  // uniform, so the marginal of the outsider is uniform too.
  std::vector<motion::PoseSequence> five(data().norm.begin(), data().norm.begin() + 5);
  std::mt19937_64 rng(17);
  std::array<int, 5> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto t = train::sample_triplet(five, 32, rng);
    ASSERT_NE(t.seq12, t.seq3);
    ++counts[t.seq3];
  }
  double chi2 = 0.0;
  const double expected = draws / 5.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Critical value of chi-square with 4 degrees of freedom at p = 0.01.
  EXPECT_LT(chi2, 13.28);
}

TEST(Trainer, TripletWithTwoSequences) {
  std::vector<motion::PoseSequence> two = {data().norm[0], data().norm[1]};
  two[0].frames = motion::pad_edge(two[0].frames, 1);
  motion::FrameMatrix longer(300, two[0].feature_dim());
  for (int t = 0; t < 300; ++t) longer.row(t) = two[0].frames.row(t % two[0].frame_count());
  two[0].frames = longer;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto t = train::sample_triplet(two, 48, rng);
    EXPECT_EQ(t.seq3, 1 - t.seq12);
    EXPECT_EQ(t.p1.rows(), 48);
    EXPECT_EQ(t.p3.rows(), 48);
  }
  std::vector<motion::PoseSequence> one = {data().norm[0]};
  EXPECT_ERROR_CODE(train::sample_triplet(one, 32, rng), ErrorCode::DatasetTooSmall);
  EXPECT_ERROR_CODE(train::sample_triplet(two, 100, rng), ErrorCode::TooShort);
}

TEST(Trainer, GaussianKlClosedForms) {
  stylizer::StyleDistribution a, b;
  a.mu = Eigen::VectorXf::Zero(3);
  a.logvar = Eigen::VectorXf::Zero(3);
  b = a;
  EXPECT_NEAR(train::kl_gaussians(a, b), 0.0, 1e-12);
  // Mean shift of m per dimension under unit variance: m^2 / 2 each.
  b.mu = Eigen::VectorXf::Constant(3, 2.0f);
  EXPECT_NEAR(train::kl_gaussians(a, b), 3 * 2.0, 1e-6);
  // KL(N(0, s1^2) || N(0, s2^2)) = log(s2 / s1) + s1^2 / (2 s2^2) - 1/2.
  a.mu.setZero();
  b.mu.setZero();
  a.logvar = Eigen::VectorXf::Constant(3, std::log(0.25f));
  b.logvar = Eigen::VectorXf::Constant(3, std::log(4.0f));
  const double s1 = 0.5, s2 = 2.0;
  EXPECT_NEAR(train::kl_gaussians(a, b), 3 * (std::log(s2 / s1) + s1 * s1 / (2 * s2 * s2) - 0.5), 1e-6);
  b.mu = Eigen::VectorXf::Zero(4);
  EXPECT_ERROR_CODE(train::kl_gaussians(a, b), ErrorCode::DimMismatch);
}

TEST(Trainer, EffectiveWeightsFollowAblations) {
  const auto sup = train::LossWeights::defaults(stylizer::Mode::Supervised);
  stylizer::Ablations none;
  const auto w = train::effective_weights(sup, none);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], sup.hsa);
  EXPECT_EQ(w[2], sup.cyc);
  EXPECT_EQ(w[3], sup.kl);
  stylizer::Ablations off;
  off.no_autoencoding = off.no_homo_style = off.no_cycle = true;
  const auto z = train::effective_weights(sup, off);
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 0.0);
  EXPECT_EQ(z[2], 0.0);
  EXPECT_EQ(z[3], sup.kl);
  train::LossWeights bad;
  bad.kl = -1.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Trainer, ReportedTotalIsTheWeightedSum) {
  for (auto mode : {stylizer::Mode::Supervised, stylizer::Mode::Unsupervised}) {
    const stylizer::StylizerNet<float> model(small_stylizer(mode), 4);
    const codec::CodecNet<float> codec(small_codec(), 5);
    std::vector<motion::FrameMatrix> w1, w2, w3;
    for (int i = 0; i < 2; ++i) {
      w1.push_back(data().norm[i].frames.topRows(32));
      w2.push_back(data().norm[i].frames.bottomRows(32));
      w3.push_back(data().norm[i + 5].frames.topRows(32));
    }
    const auto p1 = nn::constant(motion::stack<float>(w1));
    const auto p2 = nn::constant(motion::stack<float>(w2));
    const auto p3 = nn::constant(motion::stack<float>(w3));
    std::vector<int> l12 = {0, 1}, l3 = {2, 3};
    if (mode == stylizer::Mode::Unsupervised) l12.clear(), l3.clear();
    train::LossWeights weights{0.7, 0.3, 0.2};
    const auto a = train::compute_losses<float>(p1, p2, p3, l12, l3, model, codec, weights, 42);
    const auto& r = a.report;
    EXPECT_NEAR(r.total, r.rec + 0.7 * r.hsa + 0.3 * r.cyc + 0.2 * r.kl, 1e-6 * std::max(1.0, r.total));
    EXPECT_NEAR(a.total.item(), r.total, 1e-4 * std::max(1.0, r.total));
    EXPECT_EQ(r.kl_terms, 4);
    EXPECT_GE(r.hsa, 0.0);
    EXPECT_GE(r.kl, 0.0);
    // The seed fixes every sample.
    const auto b = train::compute_losses<float>(p1, p2, p3, l12, l3, model, codec, weights, 42);
    EXPECT_EQ(a.report.total, b.report.total);
  }
}

TEST(Trainer, ShortRunIsDeterministicAndKeepsCodecFrozen) {
  const codec::Codec codec(small_codec(), 1);
  train::TrainConfig cfg;
  cfg.model = small_stylizer(stylizer::Mode::Supervised);
  cfg.weights = train::LossWeights::defaults(stylizer::Mode::Supervised);
  cfg.schedule.steps = 4;
  cfg.schedule.batch = 2;
  cfg.schedule.window = 32;
  cfg.schedule.seed = 9;
  cfg.init_seed = 10;
  const auto a = train::train_stylizer(&codec, data().norm, cfg);
  const auto b = train::train_stylizer(&codec, data().norm, cfg);
  EXPECT_EQ(a.steps_run, 4);
  const auto& pa = a.model.net().params().entries();
  const auto& pb = b.model.net().params().entries();
  for (std::size_t k = 0; k < pa.size(); ++k)
    for (std::size_t i = 0; i < pa[k].second.value().size(); ++i)
      ASSERT_EQ(pa[k].second.value()[i], pb[k].second.value()[i]);
  const auto& c0 = codec.net().params().entries();
  const auto& c1 = a.codec.net().params().entries();
  for (std::size_t k = 0; k < c0.size(); ++k)
    for (std::size_t i = 0; i < c0[k].second.value().size(); ++i)
      ASSERT_EQ(c0[k].second.value()[i], c1[k].second.value()[i]);
  EXPECT_ERROR_CODE(train::train_stylizer(nullptr, data().norm, cfg), ErrorCode::MissingCodec);
}

// -------------------------------------------------------------- inference

TEST(Inference, InterpolationEndpointsMatchPureStyles) {
  const auto b = bundle(stylizer::Mode::Unsupervised);
  const auto& content = data().raw[0];
  const auto sa = infer::style_code_from_motion(data().raw[3], std::nullopt, b);
  const auto sb = infer::style_code_from_motion(data().raw[9], std::nullopt, b);
  const auto pure_a = infer::stylize_with_code(content, sa, std::nullopt, b);
  const auto pure_b = infer::stylize_with_code(content, sb, std::nullopt, b);
  EXPECT_EQ(infer::interpolate_styles(sa, sb, 0.0, content, std::nullopt, b).frames, pure_a.frames);
  EXPECT_EQ(infer::interpolate_styles(sa, sb, 1.0, content, std::nullopt, b).frames, pure_b.frames);
  const auto mid = infer::mix_styles(sa, sb, 0.25);
  EXPECT_LT((mid.values - (0.75f * sa.values + 0.25f * sb.values)).cwiseAbs().maxCoeff(), 1e-6f);
  EXPECT_EQ(mid.provenance, stylizer::StyleProvenance::Interpolated);
  EXPECT_ERROR_CODE(infer::mix_styles(sa, sb, 1.5), ErrorCode::OutOfRange);
  EXPECT_ERROR_CODE(infer::mix_styles(sa, sb, -0.1), ErrorCode::OutOfRange);
}

TEST(Inference, ModeErrors) {
  const auto sup = bundle(stylizer::Mode::Supervised);
  const auto uns = bundle(stylizer::Mode::Unsupervised);
  const auto& c = data().raw[0];
  const auto& s = data().raw[1];
  EXPECT_ERROR_CODE(infer::stylize_label_based(c, 1, 0, uns), ErrorCode::UnsupervisedModel);
  EXPECT_ERROR_CODE(infer::stylize_prior_based(c, 0, sup), ErrorCode::SupervisedModel);
  EXPECT_ERROR_CODE(infer::stylize_motion_based(c, s, std::nullopt, sup), ErrorCode::ModeMismatch);
  EXPECT_ERROR_CODE(infer::stylize_motion_based(c, s, 2, uns), ErrorCode::ModeMismatch);
  EXPECT_ERROR_CODE(infer::ModelBundle::load(scratch_dir("empty_bundle")), ErrorCode::MissingCodec);
}

TEST(Inference, OutputKeepsLengthAndRate) {
  const auto b = bundle(stylizer::Mode::Supervised);
  motion::PoseSequence content = data().raw[2];
  content.frames = content.frames.topRows(37).eval();
  const auto out = infer::stylize_motion_based(content, data().raw[7], 3, b);
  EXPECT_EQ(out.frame_count(), 37);
  EXPECT_EQ(out.fps, content.fps);
  EXPECT_FALSE(out.normalized);
  EXPECT_TRUE(out.frames.allFinite());
}

TEST(Inference, WithoutPredictorRootComesFromContent) {
  const auto b = bundle(stylizer::Mode::Unsupervised);
  infer::StylizeOptions opts;
  opts.use_gmp = false;
  const auto& content = data().raw[4];
  const auto out = infer::stylize_motion_based(content, data().raw[11], std::nullopt, b, opts);
  EXPECT_EQ(out.frames.leftCols(3), content.frames.leftCols(3));
  opts.use_gmp = true;
  const auto with = infer::stylize_motion_based(content, data().raw[11], std::nullopt, b, opts);
  EXPECT_NE(with.frames.leftCols(3), content.frames.leftCols(3));
}

TEST(Inference, SeedsAreDeterministicAndDiverse) {
  const auto sup = bundle(stylizer::Mode::Supervised);
  const auto uns = bundle(stylizer::Mode::Unsupervised);
  const auto& c = data().raw[5];
  EXPECT_EQ(infer::stylize_label_based(c, 2, 7, sup).frames, infer::stylize_label_based(c, 2, 7, sup).frames);
  EXPECT_NE(infer::stylize_label_based(c, 2, 7, sup).frames, infer::stylize_label_based(c, 2, 8, sup).frames);
  EXPECT_EQ(infer::stylize_prior_based(c, 3, uns).frames, infer::stylize_prior_based(c, 3, uns).frames);
  EXPECT_NE(infer::stylize_prior_based(c, 3, uns).frames, infer::stylize_prior_based(c, 4, uns).frames);
}

TEST(Inference, BundleSaveLoadRoundTrip) {
  const auto b = bundle(stylizer::Mode::Supervised);
  const auto dir = scratch_dir("bundle");
  b.save(dir);
  const auto back = infer::ModelBundle::load(dir);
  ASSERT_TRUE(back.gmp.has_value());
  const auto& c = data().raw[0];
  EXPECT_EQ(infer::stylize_label_based(c, 1, 3, back).frames, infer::stylize_label_based(c, 1, 3, b).frames);
}

// ---------------------------------------------------------------- metrics

TEST(Metrics, FidOfIdenticalAndShiftedSets) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(400, 6);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  a.col(2) *= 3.0;
  EXPECT_NEAR(eval::fid(a, a), 0.0, 1e-8);
  // A pure translation leaves the covariance unchanged: FID = |c|^2.
  Eigen::RowVectorXd c(6);
  c << 1.0, -2.0, 0.5, 0.0, 3.0, -1.0;
  const Eigen::MatrixXd b = a.rowwise() + c;
  EXPECT_NEAR(eval::fid(a, b), c.squaredNorm(), 1e-6 * c.squaredNorm());
  // One dimension: FID = (mu_a - mu_b)^2 + (sigma_a - sigma_b)^2, and
  // scaling by 3 triples both mean and standard deviation.
  const Eigen::MatrixXd x = a.col(2) + Eigen::VectorXd::Constant(a.rows(), 0.7);
  const double mu = x.mean();
  const double sigma = std::sqrt((x.array() - mu).square().sum() / (x.rows() - 1));
  EXPECT_NEAR(eval::fid(x, 3.0 * x), 4.0 * mu * mu + 4.0 * sigma * sigma, 1e-8);
  EXPECT_ERROR_CODE(eval::fid(a.topRows(1), a), ErrorCode::DegenerateFeatures);
  EXPECT_ERROR_CODE(eval::fid(a, a.leftCols(5)), ErrorCode::DimMismatch);
}

TEST(Metrics, GeodesicDistanceOfOneRotatedJoint) {
  const auto a = still_sequence(10);
  auto b = a;
  const double theta = 0.8;
  for (int t = 0; t < 10; ++t) set_rotation(b, t, 5, Eigen::AngleAxisd(theta, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix());
  EXPECT_NEAR(eval::geodesic_distance(a, a), 0.0, 1e-6);
  EXPECT_NEAR(eval::geodesic_distance(a, b), theta / 21.0, 1e-6);
  EXPECT_ERROR_CODE(eval::geodesic_distance(a, still_sequence(9)), ErrorCode::LengthMismatch);
}

TEST(Metrics, FootSkatingOfSlidingAndStillFeet) {
  auto seq = still_sequence(30);
  const int c = seq.layout().contacts();
  EXPECT_EQ(eval::foot_skating(seq), 0.0);  // no contacts
  seq.frames.middleCols(c, 4).setOnes();
  EXPECT_NEAR(eval::foot_skating(seq), 0.0, 1e-9);
  // The root slides 0.5 m/s forward while every foot is flagged in contact.
  seq.frames.col(motion::PoseLayout::kRootVelocity + 1).setConstant(0.5f / 30.0f);
  EXPECT_NEAR(eval::foot_skating(seq), 0.5, 1e-5);
  // Flags only on half the frames do not change the mean speed.
  for (int t = 0; t < 30; t += 2) seq.frames.block(t, c, 1, 4).setZero();
  EXPECT_NEAR(eval::foot_skating(seq), 0.5, 1e-5);
}

TEST(Metrics, SummaryConfidenceInterval) {
  const auto e = eval::summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  ASSERT_TRUE(e.ci95.has_value());
  // 1.96 * sqrt(5/3) / 2.
  EXPECT_NEAR(*e.ci95, 1.26517, 1e-5);
  EXPECT_FALSE(eval::summarize({7.0}).ci95.has_value());
}

TEST(Metrics, BenchmarkTimingCountsRuns) {
  int calls = 0;
  const auto t = eval::benchmark_forward([&] { ++calls; }, 7, 2);
  EXPECT_EQ(calls, 7 + 3);  // warm-up is at least three runs
  EXPECT_EQ(t.samples_ms.size(), 7u);
  EXPECT_GE(t.median_ms, 0.0);
  EXPECT_GE(t.iqr_ms, 0.0);
}

// ------------------------------------------------------------- classifier

eval::Classifier small_classifier(eval::Target target, int width = 8) {
  eval::ClassifierConfig cfg;
  cfg.target = target;
  cfg.hidden = width;
  cfg.penultimate = width;
  return eval::Classifier(cfg, 4);
}

TEST(Classifier, FeaturesPredictionsAndPersistence) {
  auto clf = small_classifier(eval::Target::Content);
  const auto f = clf.features(data().norm[0]);
  EXPECT_EQ(f.size(), 8);
  const int p = clf.predict(data().norm[0]);
  EXPECT_GE(p, 0);
  EXPECT_LT(p, 4);
  EXPECT_EQ(clf.label_of(data().norm[0]), *data().norm[0].content_label);
  auto unlabeled = data().norm[0];
  unlabeled.content_label.reset();
  EXPECT_ERROR_CODE(clf.label_of(unlabeled), ErrorCode::LabelRequired);

  const auto dir = scratch_dir("classifier");
  clf.save(dir);
  EXPECT_TRUE(fs::exists(dir / "classifier_content.json"));
  const auto back = eval::Classifier::load(dir, eval::Target::Content);
  EXPECT_EQ(back.features(data().norm[3]), clf.features(data().norm[3]));

  std::vector<int> labels;
  for (const auto& s : data().norm) labels.push_back(clf.predict(s));
  EXPECT_DOUBLE_EQ(eval::accuracy(clf, data().norm, labels), 1.0);
  labels.pop_back();
  EXPECT_ERROR_CODE(eval::accuracy(clf, data().norm, labels), ErrorCode::LengthMismatch);
}

TEST(Classifier, ShortTrainingFitsStyleLabels) {
  auto clf = small_classifier(eval::Target::Style, 32);
  std::vector<int> labels;
  for (const auto& s : data().norm) labels.push_back(*s.style_label);
  train::Schedule s;
  s.steps = 300;
  s.batch = 8;
  s.window = 32;
  const auto r = eval::train_classifier(clf, data().norm, data().norm, s);
  EXPECT_TRUE(std::isfinite(r.final_loss));
  // Four styles, one clip per cell: chance is 0.25.
  EXPECT_GE(eval::accuracy(clf, data().norm, labels), 0.75);
  EXPECT_DOUBLE_EQ(r.train_accuracy, eval::accuracy(clf, data().norm, labels));
  EXPECT_ERROR_CODE(eval::diversity(clf, std::span(data().norm).first(1)), ErrorCode::TooFew);
  EXPECT_GT(eval::diversity(clf, data().norm), 0.0);
}

// --------------------------------------------------------------- protocol

TEST(Protocol, TinyRunWritesReports) {
  const auto b = bundle(stylizer::Mode::Supervised);
  const auto style_clf = small_classifier(eval::Target::Style);
  const auto content_clf = small_classifier(eval::Target::Content);
  const auto dir = scratch_dir("protocol");
  eval::ProtocolOptions opts;
  opts.repeats = 2;
  opts.diversity_samples = 2;
  opts.diversity_clips = 2;
  opts.dump_features = dir / "features.csv";
  std::vector<motion::PoseSequence> test(data().raw.begin(), data().raw.begin() + 4);
  const auto report = eval::evaluate_protocol(b, style_clf, content_clf, test, data().raw, opts);
  EXPECT_EQ(report.repeats, 2);
  for (const auto* e : {&report.style_acc, &report.content_acc, &report.style_fid, &report.content_fid,
                        &report.geo_dis, &report.diversity, &report.foot_skating}) {
    EXPECT_EQ(e->values.size(), 2u);
    EXPECT_TRUE(std::isfinite(e->mean));
    EXPECT_TRUE(e->ci95.has_value());
  }
  EXPECT_GE(report.style_acc.mean, 0.0);
  EXPECT_LE(report.style_acc.mean, 1.0);

  eval::write_report_json(report, dir / "report.json");
  eval::write_report_csv(report, dir / "report.csv");
  EXPECT_TRUE(fs::exists(dir / "features.csv"));
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["repeats"], 2);
  EXPECT_EQ(j["metrics"]["content_fid"]["values"].size(), 2u);
  EXPECT_NEAR(j["metrics"]["geo_dis"]["mean"].get<double>(), report.geo_dis.mean, 1e-12);
  std::ifstream csv(dir / "report.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "metric,mean,ci95,repeats");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) rows += !line.empty();
  EXPECT_EQ(rows, 7);
}

TEST(Protocol, RepeatStreamsArePrefixStable) {
  const auto b = bundle(stylizer::Mode::Unsupervised);
  const auto style_clf = small_classifier(eval::Target::Style);
  const auto content_clf = small_classifier(eval::Target::Content);
  std::vector<motion::PoseSequence> test(data().raw.begin(), data().raw.begin() + 3);
  eval::ProtocolOptions opts;
  opts.diversity_samples = 2;
  opts.diversity_clips = 1;
  opts.repeats = 1;
  const auto one = eval::evaluate_protocol(b, style_clf, content_clf, test, data().raw, opts);
  opts.repeats = 2;
  const auto two = eval::evaluate_protocol(b, style_clf, content_clf, test, data().raw, opts);
  EXPECT_EQ(one.geo_dis.values[0], two.geo_dis.values[0]);
  EXPECT_EQ(one.content_fid.values[0], two.content_fid.values[0]);
}
