#pragma once

#include "motionstyle/eval/classifier.hpp"
#include "motionstyle/motion/pose.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace motionstyle::eval {

inline constexpr double kFidEigenClamp = 1e-10;

/// Frechet distance between Gaussian fits (rows are samples; covariance
/// uses 1/(n-1)). The cross term uses the eigendecomposition of the
/// symmetrized product S_a^{1/2} S_b S_a^{1/2}. Throws DegenerateFeatures.
double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Mean relative rotation angle over frames and joints of two raw sequences.
/// Throws LengthMismatch.
double geodesic_distance(const motion::PoseSequence& a, const motion::PoseSequence& b);

/// Mean pairwise Euclidean distance between classifier features of k >= 2
/// outputs (normalized). Throws TooFew.
double diversity(const Classifier& clf, std::span<const motion::PoseSequence> outputs);

/// Mean planar (x, z) speed in m/s of the foot joints over frames whose
/// contact label is 1; 0 without contact frames. Raw sequence.
double foot_skating(const motion::PoseSequence& seq);

struct Timing {
  double median_ms = 0.0;
  double iqr_ms = 0.0;
  std::vector<double> samples_ms;
};

/// Wall-clock of `fn` after `warmup` untimed runs (at least 3).
Timing benchmark_forward(const std::function<void()>& fn, int repeats, int warmup = 3);

}  // namespace motionstyle::eval
