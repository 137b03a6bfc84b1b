#pragma once

#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/pose.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace motionstyle::synth {

/// Global motion traits applied on top of a gait.
struct StyleFactor {
  int style_id = 0;
  std::string name;
  double amplitude_scale = 1.0;  // [0.5, 2]
  double torso_lean = 0.0;       // lateral, radians, [-0.5, 0.5]; positive leans left
  double cadence_scale = 1.0;    // [0.5, 2]
  double arm_swing_scale = 1.0;
  /// Axis-angle offsets per joint (upper body only is meaningful).
  std::vector<Eigen::Vector3d> posture_offset;

  void validate() const;
};

enum class Gait { Walk, Run, March, KickStep };

std::string to_string(Gait gait);

/// yaw(t) = rate * t + wobble_amplitude * sin(2 pi t / wobble_period + phase).
struct HeadingProfile {
  double rate = 0.0;              // rad / frame
  double wobble_amplitude = 0.0;  // rad
  double wobble_period = 90.0;    // frames
};

struct ContentFactor {
  int content_id = 0;
  Gait gait = Gait::Walk;
  HeadingProfile heading;
  double speed = 1.2;  // nominal m/s; scales stride amplitude

  void validate() const;
};

/// The four default style presets: neutral, exaggerated, stooped-lean, brisk.
/// Indices beyond 3 draw parameters deterministically from `seed`.
std::vector<StyleFactor> default_styles(int count, std::uint64_t seed = 0);

/// Walk, run, march, kick-step; indices beyond 3 reuse a gait with a different
/// heading curve and speed.
std::vector<ContentFactor> default_contents(int count);

struct GeneratedClip {
  motion::PoseSequence sequence;     // raw features, labels set
  motion::JointPositions positions;  // ground-truth world joint positions
  motion::MotionState state;
};

/// Deterministic in (content, style, length, seed, fps). The clip starts at
/// the ground-plane origin with zero yaw; the stance foot is held fixed.
GeneratedClip generate_clip(const ContentFactor& content, const StyleFactor& style, int length,
                            std::uint64_t seed, double fps = 30.0);

struct CorpusSpec {
  int n_styles = 4;
  int n_contents = 4;
  int clips_per_cell = 25;
  int length = 160;
  std::uint64_t seed = 7;
  double fps = 30.0;
};

enum class Split { Train, Test };

struct CorpusEntry {
  std::string name;  // file base name relative to the corpus directory
  int style = 0;
  int content = 0;
  Split split = Split::Train;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  CorpusSpec spec;
  std::vector<StyleFactor> styles;
  std::vector<ContentFactor> contents;
  std::vector<CorpusEntry> entries;

  std::vector<const CorpusEntry*> split(Split which) const;
};

/// Test clips per style x content cell: floor(clips / 10), at least one when
/// the cell has two or more clips.
int test_clips_per_cell(int clips_per_cell);

/// Seed of one clip, derived from the corpus seed and the cell coordinates.
std::uint64_t clip_seed(std::uint64_t corpus_seed, int style, int content, int index);

/// Writes every clip as a motion file pair plus `corpus.json`. Throws IoError.
CorpusManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

/// Builds the manifest without touching the filesystem.
CorpusManifest plan_corpus(const CorpusSpec& spec);

CorpusManifest load_corpus_manifest(const std::filesystem::path& dir);

/// Clips of one split loaded from disk (labels come from the motion manifests).
std::vector<motion::PoseSequence> load_split(const std::filesystem::path& dir,
                                             const CorpusManifest& manifest, Split which);

/// Same clips generated in memory (no disk round trip).
std::vector<motion::PoseSequence> generate_split(const CorpusManifest& manifest, Split which);

}  // namespace motionstyle::synth
