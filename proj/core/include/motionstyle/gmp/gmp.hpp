#pragma once

#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/pose.hpp"
#include "motionstyle/nn/layers.hpp"
#include "motionstyle/train/schedule.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace motionstyle::gmp {

/// Three kernel-3 temporal convolutions from the local feature block to the
/// four root channels.
struct GmpConfig {
  int local_dim = 252;  // positions + velocities + rotations for 21 joints
  int hidden = 256;
  /// Also overwrite root height (channel 3) at inference; by default only
  /// the yaw rate and planar velocity are replaced.
  bool overwrite_height = false;

  void validate() const;
};

template <typename T>
class GmpNet {
 public:
  GmpNet(const GmpConfig& config, std::uint64_t seed);

  /// [B, T, local_dim] -> [B, T, 4]; same length.
  nn::Var<T> forward(const nn::Var<T>& local) const;

  const GmpConfig& config() const { return config_; }
  nn::ParameterStore<T>& params() { return store_; }
  const nn::ParameterStore<T>& params() const { return store_; }

 private:
  GmpConfig config_;
  nn::ParameterStore<T> store_;
  nn::Conv1d<T> c1_, c2_, c3_;
};

/// Local channels (everything between the root and contact blocks).
motion::FrameMatrix local_block(const motion::FrameMatrix& frames, int joints = 21);

class GlobalMotionPredictor {
 public:
  GlobalMotionPredictor(const GmpConfig& config, std::uint64_t seed);

  /// T x 4 normalized root features predicted from a normalized sequence.
  motion::FrameMatrix predict_root(const motion::PoseSequence& seq) const;

  /// Copy of `seq` (normalized) with the predicted root written into the
  /// yaw-rate and planar-velocity channels, plus height when configured.
  motion::PoseSequence apply(const motion::PoseSequence& seq) const;

  const GmpConfig& config() const { return net_.config(); }
  GmpNet<float>& net() { return net_; }

  void save(const std::filesystem::path& dir) const;
  static GlobalMotionPredictor load(const std::filesystem::path& dir);

 private:
  GmpNet<float> net_;
};

struct GmpReport {
  double initial_mae = 0.0;
  double final_mae = 0.0;
  double root_error_mm = 0.0;
  std::vector<std::pair<int, double>> curve;
};

/// Mean absolute error of the normalized root channels over clips.
double root_mae(const GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> clips);

/// Mean distance in millimetres between the integrated root trajectory of
/// each clip and that of the clip with predicted root channels.
double root_error_mm(const GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> clips,
                     const motion::NormStats& stats);

/// L1 regression of the root block from the local block on normalized clips.
/// Labels are not used. Throws Diverged, NotNormalized.
GmpReport train_gmp(GlobalMotionPredictor& gmp, std::span<const motion::PoseSequence> train,
                    std::span<const motion::PoseSequence> heldout, const motion::NormStats& stats,
                    const train::Schedule& schedule);

extern template class GmpNet<float>;
extern template class GmpNet<double>;

}  // namespace motionstyle::gmp
