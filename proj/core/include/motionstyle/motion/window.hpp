#pragma once

#include "motionstyle/motion/pose.hpp"

#include <random>
#include <utility>
#include <vector>

namespace motionstyle::motion {

PoseSequence slice_frames(const PoseSequence& seq, int start, int length);

/// Windows starting at 0, stride, 2*stride, ... that fit entirely. Throws TooShort.
std::vector<PoseSequence> window(const PoseSequence& seq, int length = 160, int stride = 160);

/// Start frames of two same-length sub-clips drawn independently and uniformly.
std::pair<int, int> homo_pair_starts(int frame_count, int length, std::mt19937_64& rng);

/// Two sub-clips of one sequence with independent uniform starts. Throws TooShort.
std::pair<PoseSequence, PoseSequence> homo_pair(const PoseSequence& seq, int length,
                                                std::mt19937_64& rng);

}  // namespace motionstyle::motion
