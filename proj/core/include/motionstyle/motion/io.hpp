#pragma once

#include "motionstyle/motion/normalize.hpp"
#include "motionstyle/motion/pose.hpp"

#include <filesystem>
#include <memory>

namespace motionstyle::motion {

inline constexpr int kMotionFormatVersion = 1;

/// Writes `<base>.json` (manifest) and `<base>.f32` (T x D float32,
/// little-endian, row-major). `path` may carry either extension or none.
void save_motion(const PoseSequence& seq, const std::filesystem::path& path);

/// Reads a manifest/payload pair. The skeleton is resolved from the
/// manifest's skeleton_id: the built-in skeleton for "default21", otherwise
/// `<dir>/<skeleton_id>.skeleton.json`, unless one is supplied.
/// Throws BadMagic, UnsupportedVersion, ShapeMismatch, IoError.
PoseSequence load_motion(const std::filesystem::path& path,
                         std::shared_ptr<const Skeleton> skeleton = nullptr);

void save_skeleton(const Skeleton& skeleton, const std::filesystem::path& path);
std::shared_ptr<const Skeleton> load_skeleton(const std::filesystem::path& path);

void save_norm_stats(const NormStats& stats, const std::filesystem::path& path);
NormStats load_norm_stats(const std::filesystem::path& path);

/// Strips a trailing .json / .f32 extension.
std::filesystem::path motion_base(const std::filesystem::path& path);

}  // namespace motionstyle::motion
