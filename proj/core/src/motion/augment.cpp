#include "motionstyle/motion/augment.hpp"

#include "motionstyle/error.hpp"

#include <cmath>

namespace motionstyle::motion {

PoseSequence mirror(const PoseSequence& seq) {
  if (!seq.skeleton || seq.skeleton->mirror_pairs.empty())
    raise(ErrorCode::MissingMirrorMap, "skeleton declares no mirror pairs");
  const auto& skel = *seq.skeleton;
  const PoseLayout layout = seq.layout();
  const int J = layout.joints;
  const auto map = skel.mirror_map();
  // Reflection M = diag(-1, 1, 1); M R M flips entries whose row/column
  // parity differs: R10, R20, R01 of the first two columns.
  static constexpr float kSixdSign[6] = {1.f, -1.f, -1.f, -1.f, 1.f, 1.f};

  std::array<int, 4> contact_map{};
  for (int f = 0; f < 4; ++f) {
    const int partner = map[skel.foot_joints[f]];
    contact_map[f] = f;
    for (int g = 0; g < 4; ++g)
      if (skel.foot_joints[g] == partner) contact_map[f] = g;
  }

  PoseSequence out = seq;
  const int T = seq.frame_count();
  for (int t = 0; t < T; ++t) {
    auto src = seq.frames.row(t);
    auto dst = out.frames.row(t);
    dst(PoseLayout::kRootYawRate) = -src(PoseLayout::kRootYawRate);
    dst(PoseLayout::kRootVelocity) = -src(PoseLayout::kRootVelocity);
    for (int j = 0; j < J; ++j) {
      const int m = map[j];
      for (int k = 0; k < 3; ++k) {
        const float sign = k == 0 ? -1.f : 1.f;
        dst(layout.positions() + 3 * j + k) = sign * src(layout.positions() + 3 * m + k);
        dst(layout.velocities() + 3 * j + k) = sign * src(layout.velocities() + 3 * m + k);
      }
      for (int k = 0; k < 6; ++k)
        dst(layout.rotations() + 6 * j + k) = kSixdSign[k] * src(layout.rotations() + 6 * m + k);
    }
    for (int f = 0; f < 4; ++f)
      dst(layout.contacts() + f) = src(layout.contacts() + contact_map[f]);
  }
  return out;
}

PoseSequence resample_fps(const PoseSequence& seq, double target_fps) {
  if (target_fps <= 0.0) raise(ErrorCode::OutOfRange, "target fps must be positive");
  if (target_fps > seq.fps + 1e-9)
    raise(ErrorCode::UpsamplingUnsupported, "cannot resample to a higher frame rate");
  const double ratio = seq.fps / target_fps;
  const int T = seq.frame_count();
  if (std::abs(ratio - 1.0) < 1e-12) return seq;

  const PoseLayout layout = seq.layout();
  PoseSequence out = seq;
  out.fps = target_fps;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) < 1e-9) {
    const int stride = static_cast<int>(rounded);
    const int n = (T + stride - 1) / stride;
    out.frames.resize(n, seq.feature_dim());
    for (int k = 0; k < n; ++k) out.frames.row(k) = seq.frames.row(k * stride);
  } else {
    const int n = static_cast<int>(std::floor((T - 1) / ratio)) + 1;
    out.frames.resize(n, seq.feature_dim());
    for (int k = 0; k < n; ++k) {
      const double s = k * ratio;
      const int i0 = std::min(static_cast<int>(std::floor(s)), T - 1);
      const int i1 = std::min(i0 + 1, T - 1);
      const float w = static_cast<float>(s - i0);
      out.frames.row(k) = (1.0f - w) * seq.frames.row(i0) + w * seq.frames.row(i1);
      const int nearest = std::min(static_cast<int>(std::lround(s)), T - 1);
      out.frames.block(k, layout.contacts(), 1, 4) = seq.frames.block(nearest, layout.contacts(), 1, 4);
    }
  }
  // Per-frame rates cover `ratio` source frames after resampling.
  const float r = static_cast<float>(ratio);
  out.frames.leftCols(3) *= r;
  out.frames.middleCols(layout.velocities(), 3 * layout.joints) *= r;
  return out;
}

}  // namespace motionstyle::motion
