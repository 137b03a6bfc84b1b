#pragma once

#include "motionstyle/motion/pose.hpp"

#include <Eigen/Core>

#include <vector>

namespace motionstyle::motion {

/// T x J world-space joint positions.
class JointPositions {
 public:
  JointPositions() = default;
  JointPositions(int frames, int joints)
      : frames_(frames), joints_(joints), data_(static_cast<std::size_t>(frames) * joints,
                                                Eigen::Vector3d::Zero()) {}

  int frames() const { return frames_; }
  int joints() const { return joints_; }
  Eigen::Vector3d& at(int t, int j) { return data_[static_cast<std::size_t>(t) * joints_ + j]; }
  const Eigen::Vector3d& at(int t, int j) const {
    return data_[static_cast<std::size_t>(t) * joints_ + j];
  }

 private:
  int frames_ = 0;
  int joints_ = 0;
  std::vector<Eigen::Vector3d> data_;
};

/// Root trajectory recovered from the root channels: yaw starts at 0 and the
/// root at the origin of the ground plane; frame t integrates the rates of
/// frame t-1.
struct RootTrajectory {
  std::vector<double> yaw;
  std::vector<Eigen::Vector3d> position;
};

RootTrajectory integrate_root(const PoseSequence& seq);

/// Poses the skeleton from the 6D rotation block along the integrated root
/// trajectory. Requires an unnormalized sequence.
JointPositions forward_kinematics(const PoseSequence& seq);

/// Per-frame local rotations of every joint (joint 0 relative to the heading
/// frame), decoded from the 6D block.
std::vector<std::vector<Eigen::Matrix3d>> local_rotations(const PoseSequence& seq);

/// Default contact threshold on per-frame displacement: 0.002 m at 30 fps,
/// scaled by 30 / fps.
double default_contact_threshold(double fps);

/// Label 1 where the squared per-frame displacement of a foot joint is
/// strictly below threshold^2. Frame 0 copies frame 1. Requires T >= 2.
/// A non-positive threshold selects the default.
Eigen::MatrixXf detect_foot_contacts(const JointPositions& positions, const Skeleton& skeleton,
                                     double fps, double threshold = 0.0);

/// Full kinematic state of a clip; what a motion source (mocap importer or
/// the procedural generator) produces before featurization.
struct MotionState {
  std::vector<double> root_yaw;                          // radians, per frame
  std::vector<Eigen::Vector3d> root_position;            // world, per frame
  std::vector<std::vector<Eigen::Matrix3d>> rotations;   // [t][j]; j = 0 is root local tilt
};

/// World joint positions of a kinematic state.
JointPositions pose_state(const MotionState& state, const Skeleton& skeleton);

/// Builds the feature matrix of a kinematic state (contacts detected from the
/// posed joints). Root velocities of the last frame repeat the previous frame.
PoseSequence featurize(const MotionState& state, std::shared_ptr<const Skeleton> skeleton,
                       double fps);

/// Rewrites the contact block from forward kinematics of `seq`.
PoseSequence recompute_contacts(const PoseSequence& seq);

/// Root-aligned mean per-joint position error (metres) between two
/// unnormalized sequences of equal length: both are posed with their planar
/// root motion removed.
double mpjpe(const PoseSequence& a, const PoseSequence& b);

}  // namespace motionstyle::motion
