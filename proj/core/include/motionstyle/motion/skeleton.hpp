#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace motionstyle::motion {

/// Kinematic tree. Joint 0 is the root and every other joint's parent has a
/// smaller index. Offsets are rest-pose bone vectors in the parent frame
/// (metres; y up, x towards the character's left, z forward).
struct Skeleton {
  std::string id = "default21";
  std::vector<int> parents;
  std::vector<Eigen::Vector3d> offsets;
  /// left heel, left toe, right heel, right toe
  std::array<int, 4> foot_joints{};
  std::vector<std::pair<int, int>> mirror_pairs;
  double height = 0.0;

  int joint_count() const { return static_cast<int>(parents.size()); }

  /// Index of the mirrored partner of every joint (identity for centre joints).
  std::vector<int> mirror_map() const;

  /// Throws ShapeMismatch when an invariant is violated.
  void validate() const;
};

/// The 21-joint humanoid used throughout the library.
std::shared_ptr<const Skeleton> default_skeleton();

}  // namespace motionstyle::motion
