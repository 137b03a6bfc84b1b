#include "motionstyle/motion/batch.hpp"

#include "motionstyle/error.hpp"

namespace motionstyle::motion {

FrameMatrix pad_edge(const FrameMatrix& frames, int multiple) {
  const int t = static_cast<int>(frames.rows());
  if (t == 0) raise(ErrorCode::TooShort, "pad_edge: empty sequence");
  const int padded = (t + multiple - 1) / multiple * multiple;
  if (padded == t) return frames;
  FrameMatrix out(padded, frames.cols());
  out.topRows(t) = frames;
  for (int i = t; i < padded; ++i) out.row(i) = frames.row(t - 1);
  return out;
}

std::vector<FrameMatrix> random_windows(std::span<const PoseSequence> clips, int length, int count,
                                        std::mt19937_64& rng) {
  if (clips.empty()) raise(ErrorCode::EmptyCorpus, "random_windows: no clips");
  std::uniform_int_distribution<std::size_t> pick(0, clips.size() - 1);
  std::vector<FrameMatrix> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto& clip = clips[pick(rng)];
    const int t = clip.frame_count();
    if (t < length) raise(ErrorCode::TooShort, "random_windows: clip shorter than window");
    std::uniform_int_distribution<int> start(0, t - length);
    out.push_back(clip.frames.middleRows(start(rng), length));
  }
  return out;
}

}  // namespace motionstyle::motion
