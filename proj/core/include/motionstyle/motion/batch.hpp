#pragma once

#include "motionstyle/motion/pose.hpp"
#include "motionstyle/nn/tensor.hpp"

#include <random>
#include <span>
#include <vector>

namespace motionstyle::motion {

/// [1, T, D] tensor of a frame matrix.
template <typename T>
nn::Tensor<T> to_tensor(const FrameMatrix& frames) {
  nn::Tensor<T> out(1, static_cast<int>(frames.rows()), static_cast<int>(frames.cols()));
  for (Eigen::Index i = 0; i < frames.size(); ++i) out[i] = static_cast<T>(frames.data()[i]);
  return out;
}

/// Frames of batch item `b`.
template <typename T>
FrameMatrix to_frames(const nn::Tensor<T>& x, int b = 0) {
  FrameMatrix out(x.t(), x.c());
  const T* src = x.row(b, 0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = static_cast<float>(src[i]);
  return out;
}

/// Stacks equally long frame blocks into [n, T, D].
template <typename T>
nn::Tensor<T> stack(std::span<const FrameMatrix> blocks) {
  const int n = static_cast<int>(blocks.size());
  const int t = n ? static_cast<int>(blocks[0].rows()) : 0;
  const int c = n ? static_cast<int>(blocks[0].cols()) : 0;
  nn::Tensor<T> out(n, t, c);
  for (int b = 0; b < n; ++b) {
    T* dst = out.row(b, 0);
    for (Eigen::Index i = 0; i < blocks[b].size(); ++i) dst[i] = static_cast<T>(blocks[b].data()[i]);
  }
  return out;
}

/// Extends a frame block to a multiple of `multiple` frames by repeating the
/// last frame.
FrameMatrix pad_edge(const FrameMatrix& frames, int multiple);

/// `count` windows of `length` frames, each from a uniformly chosen clip at a
/// uniform start. Clips must be at least `length` long.
std::vector<FrameMatrix> random_windows(std::span<const PoseSequence> clips, int length, int count,
                                        std::mt19937_64& rng);

}  // namespace motionstyle::motion
