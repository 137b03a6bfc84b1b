#include "motionstyle/eval/metrics.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/rotation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace motionstyle::eval {

namespace {

void gaussian_fit(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

double quantile(std::vector<double> sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() == 0 || b.cols() == 0 || a.rows() < 2 || b.rows() < 2)
    raise(ErrorCode::DegenerateFeatures, "fid needs d > 0 and at least two samples per set");
  if (a.cols() != b.cols()) raise(ErrorCode::DimMismatch, "fid: feature widths differ");
  Eigen::VectorXd mu_a, mu_b;
  Eigen::MatrixXd cov_a, cov_b;
  gaussian_fit(a, mu_a, cov_a);
  gaussian_fit(b, mu_b, cov_b);
  const Eigen::MatrixXd root_a = symmetric_sqrt(cov_a);
  const Eigen::MatrixXd inner = root_a * cov_b * root_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  double cross = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double l = eig.eigenvalues()[i];
    if (l > kFidEigenClamp) cross += std::sqrt(l);
  }
  const double value = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() - 2.0 * cross;
  return std::max(value, 0.0);
}

double geodesic_distance(const motion::PoseSequence& a, const motion::PoseSequence& b) {
  if (a.frame_count() != b.frame_count()) raise(ErrorCode::LengthMismatch, "geodesic_distance: frame counts differ");
  if (a.layout().joints != b.layout().joints) raise(ErrorCode::ShapeMismatch, "geodesic_distance: skeletons differ");
  const auto ra = motion::local_rotations(a);
  const auto rb = motion::local_rotations(b);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < ra.size(); ++t)
    for (std::size_t j = 0; j < ra[t].size(); ++j) {
      sum += motion::rotation_angle_between(ra[t][j], rb[t][j]);
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double diversity(const Classifier& clf, std::span<const motion::PoseSequence> outputs) {
  if (outputs.size() < 2) raise(ErrorCode::TooFew, "diversity needs at least two outputs");
  const Eigen::MatrixXd f = clf.features(outputs);
  double sum = 0.0;
  int pairs = 0;
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (Eigen::Index j = i + 1; j < f.rows(); ++j) {
      sum += (f.row(i) - f.row(j)).norm();
      ++pairs;
    }
  return sum / pairs;
}

double foot_skating(const motion::PoseSequence& seq) {
  const int T = seq.frame_count();
  if (T < 2) return 0.0;
  const auto pos = motion::forward_kinematics(seq);
  const auto layout = seq.layout();
  double sum = 0.0;
  int count = 0;
  for (int f = 0; f < 4; ++f) {
    const int j = seq.skeleton->foot_joints[f];
    for (int t = 0; t < T; ++t) {
      if (seq.frames(t, layout.contacts() + f) < 0.5f) continue;
      // Displacement into frame t (frame 0 borrows frame 1), as in contact detection.
      const int a = t == 0 ? 0 : t - 1;
      const int b = t == 0 ? 1 : t;
      const Eigen::Vector3d d = pos.at(b, j) - pos.at(a, j);
      sum += std::hypot(d.x(), d.z()) * seq.fps;
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

Timing benchmark_forward(const std::function<void()>& fn, int repeats, int warmup) {
  if (repeats < 1) raise(ErrorCode::OutOfRange, "benchmark needs at least one repeat");
  for (int i = 0; i < std::max(3, warmup); ++i) fn();
  Timing out;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    out.samples_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::vector<double> sorted = out.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  out.median_ms = quantile(sorted, 0.5);
  out.iqr_ms = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  return out;
}

}  // namespace motionstyle::eval
