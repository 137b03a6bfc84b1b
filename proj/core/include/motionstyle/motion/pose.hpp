#pragma once

#include "motionstyle/motion/skeleton.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>

namespace motionstyle::motion {

/// Channel offsets of the per-frame feature vector for J joints:
/// root yaw rate | root planar velocity (x, z) | root height |
/// local positions (J x 3) | local velocities (J x 3) | 6D rotations (J x 6) |
/// foot contacts (4). Width is 4 + 12J + 4 (260 for J = 21).
struct PoseLayout {
  int joints = 21;

  static constexpr int kRootYawRate = 0;
  static constexpr int kRootVelocity = 1;
  static constexpr int kRootHeight = 3;
  static constexpr int kRootChannels = 4;
  static constexpr int kContactChannels = 4;

  int positions() const { return kRootChannels; }
  int velocities() const { return kRootChannels + 3 * joints; }
  int rotations() const { return kRootChannels + 6 * joints; }
  int contacts() const { return kRootChannels + 12 * joints; }
  int dim() const { return kRootChannels + 12 * joints + kContactChannels; }

  /// Width of the block fed to the global-motion predictor (everything but
  /// root and contact channels).
  int local_dim() const { return 12 * joints; }
};

using FrameMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// T x D per-frame features plus metadata. Values are immutable once built
/// by convention; operations return new sequences.
struct PoseSequence {
  FrameMatrix frames;
  double fps = 30.0;
  std::shared_ptr<const Skeleton> skeleton;
  bool normalized = false;
  std::optional<int> style_label;
  std::optional<int> content_label;

  int frame_count() const { return static_cast<int>(frames.rows()); }
  int feature_dim() const { return static_cast<int>(frames.cols()); }
  PoseLayout layout() const { return PoseLayout{skeleton ? skeleton->joint_count() : 21}; }
};

}  // namespace motionstyle::motion
