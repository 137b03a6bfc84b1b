#include "motionstyle/eval/classifier.hpp"

#include "checkpoint.hpp"
#include "motionstyle/error.hpp"
#include "motionstyle/motion/batch.hpp"

#include <cmath>
#include <sstream>

namespace motionstyle::eval {

using nn::Var;
using nlohmann::json;

namespace {

constexpr float kSlope = 0.2f;

void require_normalized(const motion::PoseSequence& seq) {
  if (!seq.normalized) raise(ErrorCode::NotNormalized, "classifier expects normalized features");
}

std::string kind_of(Target t) { return "classifier_" + to_string(t); }

}  // namespace

std::string to_string(Target t) { return t == Target::Style ? "style" : "content"; }

Classifier::Classifier(const ClassifierConfig& config, std::uint64_t seed) : config_(config) {
  if (config_.n_labels < 2) raise(ErrorCode::OutOfRange, "classifier needs at least two classes");
  std::mt19937_64 rng(seed);
  c1_ = nn::Conv1d<float>::make(store_, "conv1", config_.feature_dim, config_.hidden, 3, 1, rng);
  c2_ = nn::Conv1d<float>::make(store_, "conv2", config_.hidden, config_.hidden, 3, 2, rng);
  c3_ = nn::Conv1d<float>::make(store_, "conv3", config_.hidden, config_.penultimate, 3, 2, rng);
  head_ = nn::Linear<float>::make(store_, "head", config_.penultimate, config_.n_labels, rng);
}

std::pair<Var<float>, Var<float>> Classifier::forward(const Var<float>& x) const {
  if (x.c() != config_.feature_dim) raise(ErrorCode::ShapeMismatch, "classifier: feature width mismatch");
  auto h = nn::leaky_relu(c1_(x), kSlope);
  h = nn::leaky_relu(c2_(h), kSlope);
  h = nn::leaky_relu(c3_(h), kSlope);
  auto f = nn::mean_time(h);
  return {f, head_(f)};
}

Eigen::VectorXf Classifier::features(const motion::PoseSequence& seq) const {
  require_normalized(seq);
  nn::NoGradGuard guard;
  const auto [f, logits] = forward(nn::constant(motion::to_tensor<float>(seq.frames)));
  return Eigen::Map<const Eigen::VectorXf>(f.value().data(), f.c());
}

Eigen::MatrixXd Classifier::features(std::span<const motion::PoseSequence> seqs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(seqs.size()), config_.penultimate);
  for (std::size_t i = 0; i < seqs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features(seqs[i]).cast<double>();
  return out;
}

int Classifier::predict(const motion::PoseSequence& seq) const {
  require_normalized(seq);
  nn::NoGradGuard guard;
  const auto [f, logits] = forward(nn::constant(motion::to_tensor<float>(seq.frames)));
  const auto& v = logits.value();
  int best = 0;
  for (int k = 1; k < v.c(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

int Classifier::label_of(const motion::PoseSequence& seq) const {
  const auto& label = config_.target == Target::Style ? seq.style_label : seq.content_label;
  if (!label) raise(ErrorCode::LabelRequired, "clip has no " + to_string(config_.target) + " label");
  return *label;
}

void Classifier::save(const std::filesystem::path& dir) const {
  nn::TensorMap tensors;
  store_.export_to(tensors);
  checkpoint::save(dir, kind_of(config_.target),
                   {{"config",
                     {{"target", to_string(config_.target)},
                      {"n_labels", config_.n_labels},
                      {"feature_dim", config_.feature_dim},
                      {"hidden", config_.hidden},
                      {"penultimate", config_.penultimate}}}},
                   tensors);
}

Classifier Classifier::load(const std::filesystem::path& dir, Target target) {
  const json meta = checkpoint::load_meta(dir, kind_of(target));
  const auto& j = meta.at("config");
  ClassifierConfig c;
  c.target = target;
  c.n_labels = j.at("n_labels");
  c.feature_dim = j.at("feature_dim");
  c.hidden = j.at("hidden");
  c.penultimate = j.at("penultimate");
  Classifier clf(c, 0);
  clf.store_.import_from(checkpoint::load_tensors(dir, kind_of(target)));
  return clf;
}

double accuracy(const Classifier& clf, std::span<const motion::PoseSequence> outputs, std::span<const int> labels) {
  if (outputs.size() != labels.size()) raise(ErrorCode::LengthMismatch, "accuracy: one label per output");
  if (outputs.empty()) return 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) hits += clf.predict(outputs[i]) == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

ClassifierReport train_classifier(Classifier& clf, std::span<const motion::PoseSequence> train,
                                  std::span<const motion::PoseSequence> heldout, const train::Schedule& schedule) {
  for (const auto& c : train) require_normalized(c);
  std::vector<int> labels;
  for (const auto& c : train) labels.push_back(clf.label_of(c));
  std::mt19937_64 rng(schedule.seed);
  nn::Adam<float> adam(schedule.adam);
  adam.attach(clf.params());
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  ClassifierReport report;
  for (int step = 0; step < schedule.steps; ++step) {
    std::vector<motion::FrameMatrix> windows;
    std::vector<int> batch_labels;
    for (int b = 0; b < schedule.batch; ++b) {
      const std::size_t i = pick(rng);
      const int t = train[i].frame_count();
      const int len = std::min(schedule.window, t);
      std::uniform_int_distribution<int> start(0, t - len);
      windows.push_back(train[i].frames.middleRows(start(rng), len));
      batch_labels.push_back(labels[i]);
    }
    const auto [f, logits] = clf.forward(nn::constant(motion::stack<float>(windows)));
    const auto loss = nn::cross_entropy(logits, batch_labels);
    const double value = loss.item();
    if (!std::isfinite(value)) raise(ErrorCode::Diverged, "classifier loss is not finite");
    adam.zero_grad();
    nn::backward(loss);
    adam.step();
    report.final_loss = value;
    if (schedule.log && (step % std::max(1, schedule.log_every) == 0 || step + 1 == schedule.steps)) {
      std::ostringstream msg;
      msg << to_string(clf.config().target) << " classifier step " << step << " ce " << value;
      schedule.log(msg.str());
    }
  }
  report.train_accuracy = accuracy(clf, train, labels);
  std::vector<int> held_labels;
  for (const auto& c : heldout) held_labels.push_back(clf.label_of(c));
  report.heldout_accuracy = accuracy(clf, heldout, held_labels);
  return report;
}

}  // namespace motionstyle::eval
