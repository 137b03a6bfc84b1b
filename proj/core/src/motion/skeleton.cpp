#include "motionstyle/motion/skeleton.hpp"

#include "motionstyle/error.hpp"

#include <numeric>
#include <set>
#include <string>

namespace motionstyle::motion {

std::vector<int> Skeleton::mirror_map() const {
  std::vector<int> map(parents.size());
  std::iota(map.begin(), map.end(), 0);
  for (const auto& [l, r] : mirror_pairs) {
    map[l] = r;
    map[r] = l;
  }
  return map;
}

void Skeleton::validate() const {
  const int n = joint_count();
  if (n < 1) raise(ErrorCode::ShapeMismatch, "skeleton has no joints");
  if (static_cast<int>(offsets.size()) != n)
    raise(ErrorCode::ShapeMismatch, "skeleton offsets/parents length differ");
  if (parents[0] >= 0) raise(ErrorCode::ShapeMismatch, "joint 0 must be the root");
  for (int j = 1; j < n; ++j) {
    if (parents[j] < 0 || parents[j] >= j)
      raise(ErrorCode::ShapeMismatch, "parent of joint " + std::to_string(j) + " must precede it");
  }
  for (int f : foot_joints)
    if (f < 0 || f >= n) raise(ErrorCode::ShapeMismatch, "foot joint out of range");
  std::set<int> seen;
  for (const auto& [l, r] : mirror_pairs) {
    if (l == r) raise(ErrorCode::ShapeMismatch, "mirror pair maps a joint to itself");
    if (l < 0 || r < 0 || l >= n || r >= n) raise(ErrorCode::ShapeMismatch, "mirror pair out of range");
    if (!seen.insert(l).second || !seen.insert(r).second)
      raise(ErrorCode::ShapeMismatch, "joint appears in two mirror pairs");
  }
}

std::shared_ptr<const Skeleton> default_skeleton() {
  static const std::shared_ptr<const Skeleton> instance = [] {
    auto s = std::make_shared<Skeleton>();
    s->id = "default21";
    // pelvis, left leg (hip knee ankle toe), right leg, spine chain, left arm, right arm
    s->parents = {-1, 0, 1, 2, 3, 0, 5, 6, 7, 0, 9, 10, 11, 10, 13, 14, 15, 10, 17, 18, 19};
    s->offsets = {
        {0.0, 0.0, 0.0},                                                     // 0 pelvis
        {0.09, -0.06, 0.0}, {0.0, -0.42, 0.0}, {0.0, -0.41, 0.0}, {0.0, -0.06, 0.13},   // 1-4
        {-0.09, -0.06, 0.0}, {0.0, -0.42, 0.0}, {0.0, -0.41, 0.0}, {0.0, -0.06, 0.13},  // 5-8
        {0.0, 0.12, 0.0}, {0.0, 0.25, 0.0}, {0.0, 0.20, 0.0}, {0.0, 0.12, 0.02},        // 9-12
        {0.07, 0.15, 0.0}, {0.12, 0.0, 0.0}, {0.0, -0.28, 0.0}, {0.0, -0.25, 0.0},      // 13-16
        {-0.07, 0.15, 0.0}, {-0.12, 0.0, 0.0}, {0.0, -0.28, 0.0}, {0.0, -0.25, 0.0},    // 17-20
    };
    s->foot_joints = {3, 4, 7, 8};
    s->mirror_pairs = {{1, 5}, {2, 6}, {3, 7}, {4, 8}, {13, 17}, {14, 18}, {15, 19}, {16, 20}};
    s->height = 1.75;
    s->validate();
    return std::shared_ptr<const Skeleton>(std::move(s));
  }();
  return instance;
}

}  // namespace motionstyle::motion
