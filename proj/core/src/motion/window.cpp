#include "motionstyle/motion/window.hpp"

#include "motionstyle/error.hpp"

#include <string>

namespace motionstyle::motion {

PoseSequence slice_frames(const PoseSequence& seq, int start, int length) {
  if (start < 0 || length < 1 || start + length > seq.frame_count())
    raise(ErrorCode::TooShort, "slice [" + std::to_string(start) + ", +" + std::to_string(length) +
                                   ") exceeds " + std::to_string(seq.frame_count()) + " frames");
  PoseSequence out = seq;
  out.frames = seq.frames.middleRows(start, length);
  return out;
}

std::vector<PoseSequence> window(const PoseSequence& seq, int length, int stride) {
  if (length < 1 || stride < 1) raise(ErrorCode::OutOfRange, "window length and stride must be positive");
  if (seq.frame_count() < length) raise(ErrorCode::TooShort, "sequence shorter than window");
  std::vector<PoseSequence> out;
  for (int start = 0; start + length <= seq.frame_count(); start += stride)
    out.push_back(slice_frames(seq, start, length));
  return out;
}

std::pair<int, int> homo_pair_starts(int frame_count, int length, std::mt19937_64& rng) {
  if (frame_count < length) raise(ErrorCode::TooShort, "sequence shorter than sub-clip length");
  std::uniform_int_distribution<int> dist(0, frame_count - length);
  const int a = dist(rng);
  const int b = dist(rng);
  return {a, b};
}

std::pair<PoseSequence, PoseSequence> homo_pair(const PoseSequence& seq, int length,
                                                std::mt19937_64& rng) {
  const auto [a, b] = homo_pair_starts(seq.frame_count(), length, rng);
  return {slice_frames(seq, a, length), slice_frames(seq, b, length)};
}

}  // namespace motionstyle::motion
