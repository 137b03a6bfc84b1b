#pragma once

#include "motionstyle/motion/pose.hpp"

#include <Eigen/Core>

#include <span>

namespace motionstyle::motion {

inline constexpr double kStdFloor = 1e-6;

struct NormStats {
  Eigen::VectorXf mean;
  Eigen::VectorXf std;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Per-channel mean and (population) standard deviation over every frame of
/// every clip. Throws EmptyCorpus.
NormStats fit_norm_stats(std::span<const PoseSequence> corpus);

/// No-ops when the sequence is already in the requested state.
PoseSequence znormalize(const PoseSequence& seq, const NormStats& stats);
PoseSequence denormalize(const PoseSequence& seq, const NormStats& stats);

}  // namespace motionstyle::motion
