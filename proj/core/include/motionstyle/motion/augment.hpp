#pragma once

#include "motionstyle/motion/pose.hpp"

namespace motionstyle::motion {

/// Left/right reflection across the sagittal (x = 0) plane. Exact involution.
/// Throws MissingMirrorMap when the skeleton declares no mirror pairs.
PoseSequence mirror(const PoseSequence& seq);

/// Decimates (integral ratio) or linearly interpolates (otherwise) to a lower
/// frame rate; contacts use nearest neighbour; per-frame velocities are
/// rescaled to the new frame duration. Throws UpsamplingUnsupported.
PoseSequence resample_fps(const PoseSequence& seq, double target_fps);

}  // namespace motionstyle::motion
