#include "motionstyle/motion/kinematics.hpp"
#include "motionstyle/motion/rotation.hpp"
#include "motionstyle/synth/corpus.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace motionstyle;
using namespace motionstyle::synth;

namespace {

// Gait-driven joints only: hips, knees, ankles. Upper-body joints carry
// constant posture terms that do not scale with stride amplitude.
double mean_rotation_angle(const motion::MotionState& s) {
  double sum = 0.0;
  int n = 0;
  for (const auto& frame : s.rotations)
    for (int j : {1, 2, 3, 5, 6, 7}) {
      sum += motion::rotation_angle_between(frame[j], Eigen::Matrix3d::Identity());
      ++n;
    }
  return sum / n;
}

}  // namespace

TEST(Synth, GenerationIsDeterministic) {
  const auto styles = default_styles(4);
  const auto contents = default_contents(4);
  const auto a = generate_clip(contents[1], styles[2], 64, 99);
  const auto b = generate_clip(contents[1], styles[2], 64, 99);
  EXPECT_TRUE(a.sequence.frames == b.sequence.frames);
  const auto c = generate_clip(contents[1], styles[2], 64, 100);
  EXPECT_FALSE(a.sequence.frames == c.sequence.frames);
}

TEST(Synth, ForwardKinematicsMatchesGroundTruth) {
  const auto styles = default_styles(4);
  const auto contents = default_contents(4);
  for (int s = 0; s < 4; ++s)
    for (int c = 0; c < 4; ++c) {
      const auto clip = generate_clip(contents[c], styles[s], 160, 11 * s + c);
      const auto fk = motion::forward_kinematics(clip.sequence);
      double worst = 0.0;
      for (int t = 0; t < fk.frames(); ++t)
        for (int j = 0; j < fk.joints(); ++j)
          worst = std::max(worst, (fk.at(t, j) - clip.positions.at(t, j)).cwiseAbs().maxCoeff());
      EXPECT_LT(worst, 1e-4) << "style " << s << " content " << c;
    }
}

TEST(Synth, FeetTouchGroundAndContactsAppear) {
  const auto styles = default_styles(4);
  const auto contents = default_contents(4);
  for (int c = 0; c < 4; ++c) {
    const auto clip = generate_clip(contents[c], styles[0], 160, 5);
    const motion::PoseLayout layout{21};
    const auto contacts = clip.sequence.frames.middleCols(layout.contacts(), 4);
    const double rate = contacts.mean();
    EXPECT_GT(rate, 0.1) << "content " << c;
    EXPECT_LT(rate, 0.9) << "content " << c;
    double lowest = 1e9;
    for (int t = 0; t < 160; ++t)
      for (int j : {3, 7}) lowest = std::min(lowest, clip.positions.at(t, j).y());
    EXPECT_NEAR(lowest, 0.06, 1e-9);
  }
}

TEST(Synth, AmplitudeScaleScalesRotationMagnitude) {
  auto styles = default_styles(1);
  auto contents = default_contents(1);
  StyleFactor one = styles[0];
  StyleFactor two = styles[0];
  two.amplitude_scale = 2.0;
  two.arm_swing_scale = 1.0;
  const auto a = generate_clip(contents[0], one, 160, 3);
  const auto b = generate_clip(contents[0], two, 160, 3);
  const double ratio = mean_rotation_angle(b.state) / mean_rotation_angle(a.state);
  EXPECT_NEAR(ratio, 2.0, 0.2);  // within 10%
}

TEST(Synth, CadenceScaleHalvesStridePeriod) {
  auto styles = default_styles(1);
  auto contents = default_contents(1);
  StyleFactor slow = styles[0];
  StyleFactor fast = styles[0];
  fast.cadence_scale = 2.0;
  const motion::PoseLayout layout{21};
  auto period = [&](const StyleFactor& st) {
    const auto clip = generate_clip(contents[0], st, 320, 3);
    const Eigen::VectorXf x = clip.sequence.frames.col(layout.contacts());
    const Eigen::VectorXf d = x.array() - x.mean();
    // First autocorrelation peak after the first zero crossing.
    int best = 0;
    double best_val = -1e9;
    bool crossed = false;
    for (int lag = 1; lag < 200; ++lag) {
      const double r = d.head(d.size() - lag).dot(d.tail(d.size() - lag));
      if (r < 0) crossed = true;
      if (crossed && r > best_val) {
        best_val = r;
        best = lag;
      }
      if (crossed && r < 0 && best > 0 && best_val > 0) break;
    }
    return best;
  };
  const int p_slow = period(slow);
  const int p_fast = period(fast);
  EXPECT_NEAR(static_cast<double>(p_slow) / p_fast, 2.0, 0.25) << p_slow << " vs " << p_fast;
}

TEST(Synth, CorpusArithmeticAndManifest) {
  CorpusSpec spec;
  spec.clips_per_cell = 10;
  spec.length = 16;
  const auto dir = std::filesystem::temp_directory_path() / "motionstyle_corpus_test";
  std::filesystem::remove_all(dir);
  const auto m = generate_corpus(spec, dir);
  EXPECT_EQ(m.entries.size(), 160u);
  EXPECT_EQ(m.split(Split::Test).size(), 16u);
  const auto loaded = load_corpus_manifest(dir);
  ASSERT_EQ(loaded.entries.size(), 160u);
  const auto test = load_split(dir, loaded, Split::Test);
  ASSERT_EQ(test.size(), 16u);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto* e = loaded.split(Split::Test)[i];
    EXPECT_EQ(test[i].style_label.value(), e->style);
    EXPECT_EQ(test[i].content_label.value(), e->content);
  }
  const auto regenerated = generate_split(loaded, Split::Test);
  EXPECT_TRUE(regenerated[3].frames == test[3].frames);
  std::filesystem::remove_all(dir);
}

TEST(Synth, TestSplitSize) {
  EXPECT_EQ(test_clips_per_cell(25), 2);
  EXPECT_EQ(test_clips_per_cell(10), 1);
  EXPECT_EQ(test_clips_per_cell(2), 1);
  EXPECT_EQ(test_clips_per_cell(1), 0);
}
