#include "motionstyle/motion/normalize.hpp"

#include "motionstyle/error.hpp"

#include <cmath>

namespace motionstyle::motion {

NormStats fit_norm_stats(std::span<const PoseSequence> corpus) {
  if (corpus.empty()) raise(ErrorCode::EmptyCorpus, "cannot fit statistics on an empty corpus");
  const int D = corpus.front().feature_dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(D);
  long long frames = 0;
  for (const auto& seq : corpus) {
    if (seq.feature_dim() != D) raise(ErrorCode::ShapeMismatch, "corpus clips differ in width");
    for (int t = 0; t < seq.frame_count(); ++t) {
      const Eigen::VectorXd row = seq.frames.row(t).transpose().cast<double>();
      sum += row;
    }
    frames += seq.frame_count();
  }
  if (frames == 0) raise(ErrorCode::EmptyCorpus, "corpus has no frames");
  const Eigen::VectorXd mean = sum / static_cast<double>(frames);
  for (const auto& seq : corpus)
    for (int t = 0; t < seq.frame_count(); ++t) {
      const Eigen::VectorXd d = seq.frames.row(t).transpose().cast<double>() - mean;
      sq += d.cwiseProduct(d);
    }
  NormStats stats;
  stats.mean = mean.cast<float>();
  stats.std = (sq / static_cast<double>(frames)).cwiseSqrt().cwiseMax(kStdFloor).cast<float>();
  return stats;
}

PoseSequence znormalize(const PoseSequence& seq, const NormStats& stats) {
  if (seq.normalized) return seq;
  if (seq.feature_dim() != stats.dim()) raise(ErrorCode::ShapeMismatch, "stats width mismatch");
  PoseSequence out = seq;
  out.frames = ((seq.frames.rowwise() - stats.mean.transpose()).array().rowwise() /
                stats.std.transpose().array())
                   .matrix();
  out.normalized = true;
  return out;
}

PoseSequence denormalize(const PoseSequence& seq, const NormStats& stats) {
  if (!seq.normalized) return seq;
  if (seq.feature_dim() != stats.dim()) raise(ErrorCode::ShapeMismatch, "stats width mismatch");
  PoseSequence out = seq;
  out.frames = ((seq.frames.array().rowwise() * stats.std.transpose().array()).matrix().rowwise() +
                stats.mean.transpose());
  out.normalized = false;
  return out;
}

}  // namespace motionstyle::motion
