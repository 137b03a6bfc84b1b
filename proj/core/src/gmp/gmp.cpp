#include "motionstyle/gmp/gmp.hpp"

#include "checkpoint.hpp"
#include "motionstyle/error.hpp"
#include "motionstyle/motion/batch.hpp"
#include "motionstyle/motion/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace motionstyle::gmp {

using motion::FrameMatrix;
using motion::PoseLayout;
using nn::Var;
using nlohmann::json;

namespace {

constexpr float kSlope = 0.2f;

void require_normalized(const motion::PoseSequence& seq) {
  if (!seq.normalized) raise(ErrorCode::NotNormalized, "global-motion predictor expects normalized features");
}

std::vector<FrameMatrix> root_blocks(std::span<const FrameMatrix> windows) {
  std::vector<FrameMatrix> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(w.leftCols(PoseLayout::kRootChannels));
  return out;
}

}  // namespace

void GmpConfig::validate() const {
  if (local_dim <= 0 || hidden <= 0) raise(ErrorCode::DimMismatch, "gmp dimensions must be positive");
}

template <typename T>
GmpNet<T>::GmpNet(const GmpConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  c1_ = nn::Conv1d<T>::make(store_, "conv1", config_.local_dim, config_.hidden, 3, 1, rng);
  c2_ = nn::Conv1d<T>::make(store_, "conv2", config_.hidden, config_.hidden, 3, 1, rng);
  c3_ = nn::Conv1d<T>::make(store_, "conv3", config_.hidden, PoseLayout::kRootChannels, 3, 1, rng);
}

template <typename T>
Var<T> GmpNet<T>::forward(const Var<T>& local) const {
  if (local.c() != config_.local_dim) raise(ErrorCode::ShapeMismatch, "gmp: local block width mismatch");
  auto h = nn::leaky_relu(c1_(local), T(kSlope));
  h = nn::leaky_relu(c2_(h), T(kSlope));
  return c3_(h);
}

template class GmpNet<float>;
template class GmpNet<double>;

FrameMatrix local_block(const FrameMatrix& frames, int joints) {
  const PoseLayout layout{joints};
  return frames.middleCols(layout.positions(), layout.local_dim());
}

GlobalMotionPredictor::GlobalMotionPredictor(const GmpConfig& config, std::uint64_t seed)
    : net_(config, seed) {}

FrameMatrix GlobalMotionPredictor::predict_root(const motion::PoseSequence& seq) const {
  require_normalized(seq);
  nn::NoGradGuard guard;
  const auto local = local_block(seq.frames, seq.layout().joints);
  const auto out = net_.forward(nn::constant(motion::to_tensor<float>(local)));
  return motion::to_frames(out.value());
}

motion::PoseSequence GlobalMotionPredictor::apply(const motion::PoseSequence& seq) const {
  const FrameMatrix root = predict_root(seq);
  motion::PoseSequence out = seq;
  const int n = config().overwrite_height ? PoseLayout::kRootChannels : PoseLayout::kRootHeight;
  out.frames.leftCols(n) = root.leftCols(n);
  return out;
}

void GlobalMotionPredictor::save(const std::filesystem::path& dir) const {
  nn::TensorMap tensors;
  net_.params().export_to(tensors);
  const auto& c = net_.config();
  checkpoint::save(dir, "gmp",
                   {{"config", {{"local_dim", c.local_dim}, {"hidden", c.hidden},
                                {"overwrite_height", c.overwrite_height}, {"layers", 3}}}},
                   tensors);
}

GlobalMotionPredictor GlobalMotionPredictor::load(const std::filesystem::path& dir) {
  const json meta = checkpoint::load_meta(dir, "gmp");
  GmpConfig c;
  c.local_dim = meta.at("config").at("local_dim");
  c.hidden = meta.at("config").at("hidden");
  c.overwrite_height = meta.at("config").at("overwrite_height");
  GlobalMotionPredictor gmp(c, 0);
  gmp.net_.params().import_from(checkpoint::load_tensors(dir, "gmp"));
  return gmp;
}

double root_mae(const GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> clips) {
  if (clips.empty()) return 0.0;
  double total = 0.0;
  for (const auto& clip : clips) {
    const FrameMatrix pred = gmp.predict_root(clip);
    total += (pred - clip.frames.leftCols(PoseLayout::kRootChannels)).cwiseAbs().mean();
  }
  return total / static_cast<double>(clips.size());
}

double root_error_mm(const GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> clips,
                     const motion::NormStats& stats) {
  if (clips.empty()) return 0.0;
  double total = 0.0;
  for (const auto& clip : clips) {
    const auto truth = motion::integrate_root(motion::denormalize(clip, stats));
    const auto pred = motion::integrate_root(motion::denormalize(gmp.apply(clip), stats));
    double acc = 0.0;
    for (std::size_t t = 0; t < truth.position.size(); ++t) acc += (truth.position[t] - pred.position[t]).norm();
    total += acc / static_cast<double>(truth.position.size());
  }
  return 1000.0 * total / static_cast<double>(clips.size());
}

GmpReport train_gmp(GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> train,
                    std::span<const motion::PoseSequence> heldout, const motion::NormStats& stats,
                    const train::Schedule& schedule) {
  for (const auto& c : train) require_normalized(c);
  for (const auto& c : heldout) require_normalized(c);
  GmpReport report;
  report.initial_mae = root_mae(gmp, heldout);
  std::mt19937_64 rng(schedule.seed);
  nn::Adam<float> adam(schedule.adam);
  adam.attach(gmp.net().params());
  const int joints = train.empty() ? 21 : train[0].layout().joints;
  for (int step = 0; step < schedule.steps; ++step) {
    const auto windows = motion::random_windows(train, schedule.window, schedule.batch, rng);
    std::vector<FrameMatrix> locals;
    locals.reserve(windows.size());
    for (const auto& w : windows) locals.push_back(local_block(w, joints));
    const auto x = nn::constant(motion::stack<float>(locals));
    const auto y = nn::constant(motion::stack<float>(root_blocks(windows)));
    const auto loss = nn::l1_loss(gmp.net().forward(x), y);
    const double value = loss.item();
    if (!std::isfinite(value)) raise(ErrorCode::Diverged, "gmp training loss is not finite");
    adam.zero_grad();
    nn::backward(loss);
    adam.step();
    if (step % std::max(1, schedule.log_every) == 0 || step + 1 == schedule.steps) {
      report.curve.emplace_back(step, value);
      if (schedule.log) {
        std::ostringstream msg;
        msg << "gmp step " << step << " l1 " << value;
        schedule.log(msg.str());
      }
    }
  }
  report.final_mae = root_mae(gmp, heldout);
  report.root_error_mm = root_error_mm(gmp, heldout, stats);
  return report;
}

}  // namespace motionstyle::gmp
