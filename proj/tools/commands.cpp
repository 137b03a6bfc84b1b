#include "commands.hpp"

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/error.hpp"
#include "motionstyle/eval/classifier.hpp"
#include "motionstyle/eval/metrics.hpp"
#include "motionstyle/eval/protocol.hpp"
#include "motionstyle/gmp/gmp.hpp"
#include "motionstyle/infer/pipeline.hpp"
#include "motionstyle/motion/augment.hpp"
#include "motionstyle/motion/io.hpp"
#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/synth/corpus.hpp"
#include "motionstyle/train/trainer.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace motionstyle::cli {

namespace fs = std::filesystem;

namespace {

void log(const std::string& line) { std::cerr << line << '\n'; }

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::BadMagic, path.string() + ": " + e.what());
  }
}

void add_schedule(Params& p, int steps, int batch, double lr, int warmup) {
  p.add("steps", steps, "optimizer steps");
  p.add("batch", batch, "windows per batch");
  p.add("window", 64, "window length in frames");
  p.add("lr", lr, "Adam learning rate");
  p.add("warmup", warmup, "linear warmup steps");
  p.add("log_every", 100, "log interval in steps");
}

train::Schedule schedule_of(const Params& p) {
  train::Schedule s;
  s.steps = p.get<int>("steps");
  s.batch = p.get<int>("batch");
  s.window = p.get<int>("window");
  s.adam.lr = p.get<double>("lr");
  s.adam.warmup_steps = p.get<int>("warmup");
  s.log_every = p.get<int>("log_every");
  s.seed = p.get<std::uint64_t>("seed");
  s.log = log;
  if (s.steps < 1 || s.batch < 1 || s.window < 8) raise(ErrorCode::OutOfRange, "steps, batch >= 1 and window >= 8 required");
  return s;
}

struct CorpusData {
  synth::CorpusManifest manifest;
  std::vector<motion::PoseSequence> train, test;
};

CorpusData load_corpus(const fs::path& dir) {
  CorpusData d;
  d.manifest = synth::load_corpus_manifest(dir);
  d.train = synth::load_split(dir, d.manifest, synth::Split::Train);
  d.test = synth::load_split(dir, d.manifest, synth::Split::Test);
  if (d.train.empty()) raise(ErrorCode::EmptyCorpus, "corpus has no training clips");
  return d;
}

std::vector<motion::PoseSequence> normalize_all(const std::vector<motion::PoseSequence>& clips,
                                                const motion::NormStats& stats, bool mirror) {
  std::vector<motion::PoseSequence> out;
  for (const auto& c : clips) {
    out.push_back(motion::znormalize(c, stats));
    if (mirror) out.push_back(motion::znormalize(motion::mirror(c), stats));
  }
  return out;
}

std::vector<motion::PoseSequence> with_mirrors(const std::vector<motion::PoseSequence>& clips) {
  std::vector<motion::PoseSequence> out;
  for (const auto& c : clips) out.push_back(c), out.push_back(motion::mirror(c));
  return out;
}

void copy_if_exists(const fs::path& from_dir, const fs::path& to_dir, const std::string& name) {
  if (fs::equivalent(from_dir, to_dir)) return;
  if (fs::exists(from_dir / name)) fs::copy_file(from_dir / name, to_dir / name, fs::copy_options::overwrite_existing);
}

stylizer::Ablations parse_ablations(const std::string& list) {
  stylizer::Ablations a;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "no_latent") a.no_latent = true;
    else if (item == "no_prob_style") a.no_prob_style = true;
    else if (item == "no_homo_style") a.no_homo_style = true;
    else if (item == "no_autoencoding") a.no_autoencoding = true;
    else if (item == "no_cycle") a.no_cycle = true;
    else if (item == "prob_content") a.prob_content = true;
    else if (item == "end_to_end") a.end_to_end = true;
    else raise(ErrorCode::Usage, "unknown ablation '" + item + "'");
  }
  return a;
}

std::optional<int> optional_int(const Params& p, const std::string& key) {
  if (!p.has(key)) return std::nullopt;
  return p.get<int>(key);
}

fs::path output_base(const Params& p, const std::string& fallback) {
  return p.has("out") ? p.path("out") : fs::path(fallback);
}

json timing_json(const eval::Timing& t) {
  return {{"median_ms", t.median_ms}, {"iqr_ms", t.iqr_ms}, {"samples_ms", t.samples_ms}};
}

}  // namespace

// ------------------------------------------------------------------ gen-corpus

void GenCorpus::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  p.add("styles", 4, "number of styles");
  p.add("contents", 4, "number of contents");
  p.add("per_cell", 25, "clips per style x content cell");
  p.add("length", 160, "frames per clip");
  p.add("fps", 30.0, "frame rate");
  p.add("seed", 7, "corpus seed");
  p.add("out", (data_dir() / "corpus").string(), "output directory");
}

void GenCorpus::run() {
  auto& p = *params_;
  p.resolve();
  synth::CorpusSpec spec;
  spec.n_styles = p.get<int>("styles");
  spec.n_contents = p.get<int>("contents");
  spec.clips_per_cell = p.get<int>("per_cell");
  spec.length = p.get<int>("length");
  spec.fps = p.get<double>("fps");
  spec.seed = p.get<std::uint64_t>("seed");
  if (spec.n_styles < 1 || spec.n_contents < 1 || spec.clips_per_cell < 1 || spec.length < 2)
    raise(ErrorCode::OutOfRange, "counts must be >= 1 and length >= 2");
  const auto out = p.path("out");
  const auto m = synth::generate_corpus(spec, out);
  p.snapshot(out, "gen-corpus");
  log("wrote " + std::to_string(m.entries.size()) + " clips (" + std::to_string(m.split(synth::Split::Test).size()) +
      " test) to " + out.string());
}

// ----------------------------------------------------------------- train-codec

void TrainCodec::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  const codec::CodecConfig d;
  p.add("corpus", (data_dir() / "corpus").string(), "corpus directory");
  p.add("out", (data_dir() / "model").string(), "model directory (codec + norm stats)");
  p.add("variant", "vae", "vae | ae");
  p.add("latent_dim", d.latent_dim, "motion code width");
  p.add("hidden", d.hidden, "hidden channels");
  p.add("lambda_kld", d.lambda_kld, "VAE KL weight");
  p.add("lambda_l1", d.lambda_l1, "AE sparsity weight");
  p.add("lambda_sms", d.lambda_sms, "AE smoothness weight");
  p.add("seed", 1, "initialisation and batch seed");
  add_schedule(p, 2000, 32, 1e-4, 200);
  p.add_switch("no-mirror", "mirror", false, "skip mirrored augmentation");
}

void TrainCodec::run() {
  auto& p = *params_;
  p.resolve();
  codec::CodecConfig cfg;
  cfg.variant = codec::variant_from_string(p.get<std::string>("variant"));
  cfg.latent_dim = p.get<int>("latent_dim");
  cfg.hidden = p.get<int>("hidden");
  cfg.lambda_kld = p.get<double>("lambda_kld");
  cfg.lambda_l1 = p.get<double>("lambda_l1");
  cfg.lambda_sms = p.get<double>("lambda_sms");
  const auto data = load_corpus(p.path("corpus"));
  const bool mirror = p.get<bool>("mirror");
  const auto stats = motion::fit_norm_stats(mirror ? with_mirrors(data.train) : data.train);
  const auto train = normalize_all(data.train, stats, mirror);
  const auto heldout = normalize_all(data.test, stats, false);
  codec::Codec codec(cfg, p.get<std::uint64_t>("seed"));
  const auto report = codec::train_codec(codec, train, heldout, stats, schedule_of(p));
  const auto out = p.path("out");
  fs::create_directories(out);
  motion::save_norm_stats(stats, out / "norm_stats.json");
  codec.save(out);
  write_json(out / "codec_report.json", {{"initial_heldout_loss", report.initial_heldout_loss},
                                         {"final_heldout_loss", report.final_heldout_loss},
                                         {"heldout_mpjpe_mm", report.heldout_mpjpe_mm}});
  p.snapshot(out, "train-codec");
  log("codec held-out MPJPE " + std::to_string(report.heldout_mpjpe_mm) + " mm");
}

// ------------------------------------------------------------------- train-gmp

void TrainGmp::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  p.add("corpus", (data_dir() / "corpus").string(), "corpus directory");
  p.add("model", (data_dir() / "model").string(), "model directory holding norm_stats.json; gmp.* is written here");
  p.add("hidden", gmp::GmpConfig{}.hidden, "hidden channels");
  p.add("seed", 1, "initialisation and batch seed");
  add_schedule(p, 2000, 32, 1e-4, 200);
  p.add_switch("overwrite-height", "overwrite_height", true, "also replace root height at inference");
  p.add_switch("no-mirror", "mirror", false, "skip mirrored augmentation");
}

void TrainGmp::run() {
  auto& p = *params_;
  p.resolve();
  const auto model = p.path("model");
  const auto stats = motion::load_norm_stats(model / "norm_stats.json");
  const auto data = load_corpus(p.path("corpus"));
  gmp::GmpConfig cfg;
  cfg.hidden = p.get<int>("hidden");
  cfg.overwrite_height = p.get<bool>("overwrite_height");
  gmp::GlobalMotionPredictor g(cfg, p.get<std::uint64_t>("seed"));
  const auto report = gmp::train_gmp(g, normalize_all(data.train, stats, p.get<bool>("mirror")),
                                     normalize_all(data.test, stats, false), stats, schedule_of(p));
  g.save(model);
  write_json(model / "gmp_report.json", {{"initial_mae", report.initial_mae},
                                         {"final_mae", report.final_mae},
                                         {"root_error_mm", report.root_error_mm}});
  p.snapshot(model, "train-gmp");
  log("GMP root error " + std::to_string(report.root_error_mm) + " mm");
}

// -------------------------------------------------------------- train-stylizer

void TrainStylizer::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  const stylizer::StylizerConfig d;
  p.add("corpus", (data_dir() / "corpus").string(), "corpus directory");
  p.add("model", (data_dir() / "model").string(), "model directory with codec and norm stats");
  p.add("out", nullptr, "bundle directory to write (default: --model)");
  p.add("mode", "supervised", "supervised | unsupervised");
  p.add("ablations", "", "comma list: no_latent,no_prob_style,no_homo_style,no_autoencoding,no_cycle,prob_content,end_to_end");
  p.add("content_dim", d.content_dim, "content code width");
  p.add("style_dim", d.style_dim, "style code width");
  p.add("hidden", d.hidden, "hidden channels");
  p.add("label_embedding", d.label_embedding, "label embedding width");
  p.add("generator_layers", d.generator_layers, "generator convolution layers");
  p.add("lambda_hsa", nullptr, "homo-style weight (default by mode)", json::value_t::number_float);
  p.add("lambda_cyc", nullptr, "cycle weight (default by mode)", json::value_t::number_float);
  p.add("lambda_kl", nullptr, "KL weight (default by mode)", json::value_t::number_float);
  p.add("plateau_patience", 0, "early stop after this many steps without improvement (0 = off)");
  p.add("curves", nullptr, "CSV of per-term training curves (default: <out>/curves.csv)");
  p.add("seed", 1, "initialisation and batch seed");
  add_schedule(p, 20000, 32, 1e-4, 200);
}

void TrainStylizer::run() {
  auto& p = *params_;
  p.resolve();
  const auto model_dir = p.path("model");
  const auto out = p.has("out") ? p.path("out") : model_dir;
  const auto abl = parse_ablations(p.get<std::string>("ablations"));
  const auto stats = motion::load_norm_stats(model_dir / "norm_stats.json");

  std::optional<codec::Codec> codec;
  if (fs::exists(model_dir / "codec.json")) codec = codec::Codec::load(model_dir);
  else if (!abl.no_latent && !abl.end_to_end) raise(ErrorCode::MissingCodec, "no codec in " + model_dir.string());

  train::TrainConfig tc;
  auto& m = tc.model;
  m.mode = stylizer::mode_from_string(p.get<std::string>("mode"));
  const auto data = load_corpus(p.path("corpus"));
  m.n_labels = data.manifest.spec.n_styles;
  m.code_dim = codec ? codec->config().latent_dim : codec::CodecConfig{}.latent_dim;
  m.content_dim = p.get<int>("content_dim");
  m.style_dim = p.get<int>("style_dim");
  m.hidden = p.get<int>("hidden");
  m.label_embedding = p.get<int>("label_embedding");
  m.generator_layers = p.get<int>("generator_layers");
  m.ablations = abl;
  if (abl.no_latent) m.code_dim = std::max(m.code_dim, static_cast<int>(stats.mean.size()));
  tc.weights = train::LossWeights::defaults(m.mode);
  if (p.has("lambda_hsa")) tc.weights.hsa = p.get<double>("lambda_hsa");
  if (p.has("lambda_cyc")) tc.weights.cyc = p.get<double>("lambda_cyc");
  if (p.has("lambda_kl")) tc.weights.kl = p.get<double>("lambda_kl");
  tc.schedule = schedule_of(p);
  tc.init_seed = p.get<std::uint64_t>("seed");
  tc.plateau_patience = p.get<int>("plateau_patience");
  tc.curves_csv = p.has("curves") ? p.path("curves") : out / "curves.csv";
  fs::create_directories(out);

  auto result = train::train_stylizer(codec ? &*codec : nullptr, normalize_all(data.train, stats, false), tc);
  const json provenance = {{"mode", stylizer::to_string(m.mode)},
                           {"ablations", p.get<std::string>("ablations")},
                           {"weights", {{"hsa", tc.weights.hsa}, {"cyc", tc.weights.cyc}, {"kl", tc.weights.kl}}},
                           {"steps_run", result.steps_run},
                           {"seed", tc.init_seed}};
  result.model.save(out, provenance.dump());
  // The bundle pairs the stylizer with the codec it was trained against.
  if (abl.no_latent || abl.end_to_end) result.codec.save(out);
  else copy_if_exists(model_dir, out, "codec.json"), copy_if_exists(model_dir, out, "codec.bin");
  fs::create_directories(out);
  for (const char* f : {"norm_stats.json", "gmp.json", "gmp.bin"}) copy_if_exists(model_dir, out, f);
  p.snapshot(out, "train-stylizer", {{"provenance", provenance}});
  log("stylizer trained for " + std::to_string(result.steps_run) + " steps");
}

// --------------------------------------------------------------------- stylize

namespace {

infer::StylizeOptions stylize_options(const Params& p) {
  infer::StylizeOptions o;
  o.use_gmp = p.get<bool>("use_gmp");
  o.sample_style = p.get<bool>("sample");
  o.seed = p.get<std::uint64_t>("seed");
  return o;
}

void add_stylize_common(Params& p) {
  p.add("model", (data_dir() / "model").string(), "model bundle directory");
  p.add("content", "", "content motion file");
  p.add("seed", 0, "sampling seed");
  p.add_switch("no-gmp", "use_gmp", false, "keep the content's planar root instead of predicting it");
  p.add_switch("sample", "sample", true, "sample style codes instead of using the mean");
}

}  // namespace

void Stylize::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  add_stylize_common(p);
  p.add("mode", "motion", "motion | label | prior");
  p.add("style", "", "style motion file (motion mode)");
  p.add("label", nullptr, "target style label (label mode; motion mode on supervised models)", json::value_t::number_integer);
  p.add("out", "stylized", "output motion base path");
}

void Stylize::run() {
  auto& p = *params_;
  p.resolve();
  const auto bundle = infer::ModelBundle::load(p.path("model"));
  if (p.get<std::string>("content").empty()) raise(ErrorCode::Usage, "--content is required");
  const auto content = motion::load_motion(p.path("content"));
  const auto opts = stylize_options(p);
  const auto mode = p.get<std::string>("mode");
  const bool supervised = bundle.stylizer.config().mode == stylizer::Mode::Supervised;
  motion::PoseSequence out;
  if (mode == "motion") {
    if (p.get<std::string>("style").empty()) raise(ErrorCode::Usage, "--style is required in motion mode");
    const auto style = motion::load_motion(p.path("style"));
    auto label = optional_int(p, "label");
    if (!label && supervised) label = style.style_label;
    out = infer::stylize_motion_based(content, style, label, bundle, opts);
  } else if (mode == "label") {
    if (!supervised) raise(ErrorCode::UnsupervisedModel, "label mode needs a supervised model");
    const auto label = optional_int(p, "label");
    if (!label) raise(ErrorCode::LabelRequired, "--label is required in label mode");
    out = infer::stylize_label_based(content, *label, opts.seed, bundle, opts);
  } else if (mode == "prior") {
    if (supervised) raise(ErrorCode::SupervisedModel, "prior mode needs an unsupervised model");
    out = infer::stylize_prior_based(content, opts.seed, bundle, opts);
  } else {
    raise(ErrorCode::Usage, "unknown mode '" + mode + "'");
  }
  const auto base = output_base(p, "stylized");
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  motion::save_motion(out, base);
  p.snapshot(base.has_parent_path() ? base.parent_path() : fs::path("."), "stylize");
  log("wrote " + motion::motion_base(base).string() + " (" + std::to_string(out.frame_count()) + " frames)");
}

// ----------------------------------------------------------------- interpolate

void Interpolate::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  add_stylize_common(p);
  p.add("style_a", "", "first style motion file");
  p.add("style_b", "", "second style motion file");
  p.add("label_a", nullptr, "label of style a (supervised; default from its file)", json::value_t::number_integer);
  p.add("label_b", nullptr, "label of style b (supervised; default from its file)", json::value_t::number_integer);
  p.add("label", nullptr, "generator label (supervised; default label_a)", json::value_t::number_integer);
  p.add("alpha", 0.5, "mixing weight in [0, 1]; ignored with --frames");
  p.add("frames", 0, "write this many outputs with alpha evenly spaced over [0, 1]");
  p.add("out", "interpolated", "output motion base path (index suffix with --frames)");
}

void Interpolate::run() {
  auto& p = *params_;
  p.resolve();
  const auto bundle = infer::ModelBundle::load(p.path("model"));
  for (const char* key : {"content", "style_a", "style_b"})
    if (p.get<std::string>(key).empty()) raise(ErrorCode::Usage, std::string("--") + key + " is required");
  const auto content = motion::load_motion(p.path("content"));
  const auto a = motion::load_motion(p.path("style_a"));
  const auto b = motion::load_motion(p.path("style_b"));
  const bool supervised = bundle.stylizer.config().mode == stylizer::Mode::Supervised;
  std::optional<int> la, lb, lg;
  if (supervised) {
    la = p.has("label_a") ? optional_int(p, "label_a") : a.style_label;
    lb = p.has("label_b") ? optional_int(p, "label_b") : b.style_label;
    lg = p.has("label") ? optional_int(p, "label") : la;
  } else if (p.has("label_a") || p.has("label_b") || p.has("label")) {
    raise(ErrorCode::LabelForbidden, "unsupervised models take no labels");
  }
  const auto opts = stylize_options(p);
  const auto code_a = infer::style_code_from_motion(a, la, bundle, opts);
  const auto code_b = infer::style_code_from_motion(b, lb, bundle, opts);
  const auto base = output_base(p, "interpolated");
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  const int frames = p.get<int>("frames");
  if (frames < 0) raise(ErrorCode::OutOfRange, "--frames must be >= 0");
  if (frames == 0) {
    motion::save_motion(infer::interpolate_styles(code_a, code_b, p.get<double>("alpha"), content, lg, bundle, opts), base);
  } else {
    for (int k = 0; k < frames; ++k) {
      const double alpha = frames == 1 ? 0.0 : static_cast<double>(k) / (frames - 1);
      const auto out = infer::interpolate_styles(code_a, code_b, alpha, content, lg, bundle, opts);
      motion::save_motion(out, base.string() + "_" + std::to_string(k));
    }
  }
  p.snapshot(base.has_parent_path() ? base.parent_path() : fs::path("."), "interpolate");
}

// -------------------------------------------------------------------- evaluate

void Evaluate::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  p.add("model", (data_dir() / "model").string(), "model bundle directory");
  p.add("corpus", (data_dir() / "corpus").string(), "corpus directory");
  p.add("classifiers", nullptr, "directory of oracle classifiers (trained there when absent; default <model>/classifiers)");
  p.add("repeats", 30, "protocol repeats");
  p.add("diversity_samples", 10, "samples per clip for diversity");
  p.add("diversity_clips", 4, "clips per repeat for diversity");
  p.add("classifier_steps", 600, "training steps for missing classifiers");
  p.add("seed", 1, "protocol seed");
  p.add("out", "report.json", "report JSON path");
  p.add("csv", nullptr, "optional CSV report path");
  p.add("dump_features", nullptr, "optional CSV of stylized-output features (first repeat)");
  p.add_switch("no-gmp", "use_gmp", false, "keep the content's planar root instead of predicting it");
}

void Evaluate::run() {
  auto& p = *params_;
  p.resolve();
  const auto model = p.path("model");
  const auto bundle = infer::ModelBundle::load(model);
  const auto data = load_corpus(p.path("corpus"));
  if (data.test.size() < 2) raise(ErrorCode::TooFew, "corpus test split needs at least two clips");
  const auto clf_dir = p.has("classifiers") ? p.path("classifiers") : model / "classifiers";

  auto classifier = [&](eval::Target target) {
    if (fs::exists(clf_dir / ("classifier_" + eval::to_string(target) + ".json")))
      return eval::Classifier::load(clf_dir, target);
    eval::ClassifierConfig cfg;
    cfg.target = target;
    cfg.n_labels = target == eval::Target::Style ? data.manifest.spec.n_styles : data.manifest.spec.n_contents;
    eval::Classifier clf(cfg, p.get<std::uint64_t>("seed"));
    train::Schedule s;
    s.steps = p.get<int>("classifier_steps");
    s.batch = 16;
    s.window = 96;
    s.adam.lr = 1e-3;
    s.adam.warmup_steps = 50;
    s.seed = p.get<std::uint64_t>("seed");
    s.log = log;
    s.log_every = 200;
    const auto r = eval::train_classifier(clf, normalize_all(data.train, bundle.stats, true),
                                          normalize_all(data.test, bundle.stats, false), s);
    log(eval::to_string(target) + " classifier held-out accuracy " + std::to_string(r.heldout_accuracy));
    clf.save(clf_dir);
    return clf;
  };
  const auto style_clf = classifier(eval::Target::Style);
  const auto content_clf = classifier(eval::Target::Content);

  eval::ProtocolOptions po;
  po.repeats = p.get<int>("repeats");
  po.seed = p.get<std::uint64_t>("seed");
  po.diversity_samples = p.get<int>("diversity_samples");
  po.diversity_clips = p.get<int>("diversity_clips");
  po.stylize.use_gmp = p.get<bool>("use_gmp");
  if (p.has("dump_features")) po.dump_features = p.path("dump_features");
  const auto report = eval::evaluate_protocol(bundle, style_clf, content_clf, data.test, data.test, po);
  const auto out = p.path("out");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  eval::write_report_json(report, out);
  if (p.has("csv")) eval::write_report_csv(report, p.path("csv"));
  p.snapshot(out.has_parent_path() ? out.parent_path() : fs::path("."), "evaluate");
  log("style acc " + std::to_string(report.style_acc.mean) + ", content acc " + std::to_string(report.content_acc.mean));
}

// ----------------------------------------------------------------------- bench

void Bench::setup(CLI::App* app) {
  params_.emplace(app);
  auto& p = *params_;
  p.add("model", nullptr, "model bundle directory (default: untrained full-size models)");
  p.add("content", nullptr, "content motion file (default: a generated 160-frame clip)");
  p.add("repeats", 20, "timed runs");
  p.add("warmup", 3, "untimed runs (at least 3)");
  p.add("seed", 0, "initialisation seed for untrained models");
  p.add("out", nullptr, "JSON output path (default: stdout)");
  p.add_switch("compare-no-latent", "compare_no_latent", true, "also time the no_latent ablation");
}

void Bench::run() {
  auto& p = *params_;
  p.resolve();
  const auto seed = p.get<std::uint64_t>("seed");
  motion::PoseSequence content, style;
  if (p.has("content")) {
    content = motion::load_motion(p.path("content"));
    style = content;
  } else {
    const auto styles = synth::default_styles(2);
    const auto contents = synth::default_contents(1);
    content = synth::generate_clip(contents[0], styles[0], 160, 1).sequence;
    style = synth::generate_clip(contents[0], styles[1], 160, 2).sequence;
  }
  auto fresh_bundle = [&](bool no_latent) {
    std::vector<motion::PoseSequence> both = {content, style};
    const auto stats = motion::fit_norm_stats(both);
    stylizer::StylizerConfig sc;
    sc.ablations.no_latent = no_latent;
    codec::Codec codec = no_latent ? train::identity_codec(content.feature_dim(), sc.code_dim)
                                   : codec::Codec(codec::CodecConfig{}, seed);
    return infer::ModelBundle{stats, codec, stylizer::Stylizer(sc, seed + 1), gmp::GlobalMotionPredictor(gmp::GmpConfig{}, seed + 2)};
  };
  const int repeats = p.get<int>("repeats"), warmup = p.get<int>("warmup");
  auto time = [&](const infer::ModelBundle& b) {
    std::optional<int> label;
    if (b.stylizer.config().mode == stylizer::Mode::Supervised) label = style.style_label.value_or(0);
    return eval::benchmark_forward([&] { infer::stylize_motion_based(content, style, label, b); }, repeats, warmup);
  };
  json result;
  const auto latent = p.has("model") ? infer::ModelBundle::load(p.path("model")) : fresh_bundle(false);
  result["latent"] = timing_json(time(latent));
  result["frames"] = content.frame_count();
  if (p.get<bool>("compare_no_latent")) result["no_latent"] = timing_json(time(fresh_bundle(true)));
  if (p.has("out")) {
    write_json(p.path("out"), result);
    p.snapshot(p.path("out").has_parent_path() ? p.path("out").parent_path() : fs::path("."), "bench");
  } else {
    std::cout << result.dump(2) << '\n';
  }
}

// --------------------------------------------------------------------- inspect

void Inspect::setup(CLI::App* app) {
  app->add_option("path", path_, "corpus directory, model directory, checkpoint or motion file")->required();
}

void Inspect::run() {
  const fs::path path = path_;
  json out;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "corpus.json")) {
      const auto m = synth::load_corpus_manifest(path);
      out = {{"type", "corpus"},
             {"clips", m.entries.size()},
             {"train", m.split(synth::Split::Train).size()},
             {"test", m.split(synth::Split::Test).size()},
             {"styles", m.spec.n_styles},
             {"contents", m.spec.n_contents},
             {"length", m.spec.length},
             {"fps", m.spec.fps},
             {"seed", m.spec.seed}};
    } else {
      out = {{"type", "model"}};
      for (const char* kind : {"codec", "gmp", "stylizer", "classifier_style", "classifier_content"}) {
        const auto file = path / (std::string(kind) + ".json");
        if (!fs::exists(file)) continue;
        auto meta = read_json_file(file);
        meta.erase("weights");
        out["checkpoints"][kind] = meta;
      }
      if (fs::exists(path / "norm_stats.json")) out["norm_stats"] = true;
      if (!out.contains("checkpoints")) raise(ErrorCode::IoError, "no checkpoints or corpus in " + path.string());
    }
  } else {
    auto meta = read_json_file(path.extension() == ".f32" || path.extension() == ".bin"
                                   ? fs::path(path).replace_extension(".json")
                                   : path);
    if (meta.contains("kind")) {
      meta.erase("weights");
      out = {{"type", "checkpoint"}, {"meta", meta}};
    } else {
      const auto seq = motion::load_motion(path);
      out = {{"type", "motion"},
             {"frames", seq.frame_count()},
             {"features", seq.feature_dim()},
             {"fps", seq.fps},
             {"joints", seq.layout().joints},
             {"normalized", seq.normalized},
             {"style_label", seq.style_label ? json(*seq.style_label) : json(nullptr)},
             {"content_label", seq.content_label ? json(*seq.content_label) : json(nullptr)}};
    }
  }
  std::cout << out.dump(2) << '\n';
}

}  // namespace motionstyle::cli
