#include "motionstyle/synth/corpus.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/motion/io.hpp"
#include "motionstyle/motion/rotation.hpp"

#include <Eigen/Geometry>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace motionstyle::synth {

namespace fs = std::filesystem;
using nlohmann::json;
using motion::MotionState;
using motion::Skeleton;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAnkleHeight = 0.06;

// Joint indices of the default skeleton.
enum Joint {
  kPelvis = 0,
  kLHip = 1, kLKnee = 2, kLAnkle = 3, kLToe = 4,
  kRHip = 5, kRKnee = 6, kRAnkle = 7, kRToe = 8,
  kSpine = 9, kChest = 10, kNeck = 11, kHead = 12,
  kLCollar = 13, kLShoulder = 14, kLElbow = 15, kLWrist = 16,
  kRCollar = 17, kRShoulder = 18, kRElbow = 19, kRWrist = 20,
  kJointCount = 21
};

Eigen::Matrix3d rot_x(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix(); }
Eigen::Matrix3d rot_y(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix(); }
Eigen::Matrix3d rot_z(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix(); }

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-12) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct GaitParams {
  double cycle_hz;     // full gait cycles per second
  double hip;          // hip flexion amplitude (rad)
  double hip_forward;  // extra gain on the forward half of the hip swing
  double hip_back;     // gain on the backward half
  double knee;         // swing knee flexion (rad)
  double arm;          // shoulder swing amplitude (rad)
  double elbow;        // resting elbow flexion (rad)
  double torso_pitch;  // forward torso pitch (rad)
  double nominal_speed;
  bool kick;           // left swing kicks with a nearly straight knee
};

GaitParams gait_params(Gait gait) {
  switch (gait) {
    case Gait::Walk: return {0.9, 0.35, 1.0, 1.0, 0.65, 0.30, 0.15, 0.0, 1.2, false};
    case Gait::Run: return {1.35, 0.50, 1.0, 1.0, 1.35, 0.45, 1.30, 0.18, 2.4, false};
    case Gait::March: return {0.75, 0.50, 1.5, 0.35, 1.45, 0.60, 0.0, -0.05, 1.0, false};
    case Gait::KickStep: return {0.7, 0.40, 1.0, 1.0, 0.60, 0.25, 0.35, 0.05, 1.0, true};
  }
  return gait_params(Gait::Walk);
}

// Local rotations of one frame (root tilt at index 0).
std::vector<Eigen::Matrix3d> pose_at(double phase, const GaitParams& g, const StyleFactor& style,
                                     double amp, const std::vector<Eigen::Matrix3d>& posture) {
  std::vector<Eigen::Matrix3d> R(kJointCount, Eigen::Matrix3d::Identity());
  const double arm_amp = g.arm * amp * style.arm_swing_scale;

  auto leg = [&](double ph, bool kicking, int hip, int knee, int ankle) {
    const double s = std::sin(ph);
    const double gain = s >= 0.0 ? g.hip_forward : g.hip_back;
    double flex = amp * g.hip * gain * s;
    const double swing = std::max(0.0, std::cos(ph));  // leg moving forward
    double knee_flex = amp * g.knee * std::pow(swing, 1.5);
    if (kicking) {
      flex = amp * g.hip * (s >= 0.0 ? 2.0 : 1.0) * s;
      knee_flex = amp * 0.35 * std::pow(swing, 1.5);
    }
    R[hip] = rot_x(-flex);
    R[knee] = rot_x(knee_flex);
    // Keep the sole parallel to the ground: sagittal angles cancel along the leg.
    R[ankle] = rot_x(flex - knee_flex);
  };
  leg(phase, g.kick, kLHip, kLKnee, kLAnkle);
  leg(phase + kPi, false, kRHip, kRKnee, kRAnkle);

  const double twist = 0.12 * amp * std::sin(phase);
  const double lean = style.torso_lean;
  R[kSpine] = rot_x(0.5 * g.torso_pitch) * rot_z(-0.5 * lean);
  R[kChest] = rot_y(twist) * rot_x(0.5 * g.torso_pitch) * rot_z(-0.5 * lean);
  R[kNeck] = rot_x(-0.5 * g.torso_pitch);
  R[kHead] = rot_y(-0.5 * twist);

  // Arms swing against the legs on the same side.
  const double arm_l = arm_amp * std::sin(phase + kPi);
  const double arm_r = arm_amp * std::sin(phase);
  R[kLShoulder] = rot_z(0.12) * rot_x(-arm_l);
  R[kRShoulder] = rot_z(-0.12) * rot_x(-arm_r);
  R[kLElbow] = rot_x(-(g.elbow + 0.3 * arm_amp * std::max(0.0, std::sin(phase + kPi))));
  R[kRElbow] = rot_x(-(g.elbow + 0.3 * arm_amp * std::max(0.0, std::sin(phase))));

  for (int j = 0; j < kJointCount; ++j) R[j] = posture[j] * R[j];
  return R;
}

// Root-relative ankle positions (heading frame) for a local pose.
std::pair<Eigen::Vector3d, Eigen::Vector3d> ankles(const Skeleton& skel,
                                                   const std::vector<Eigen::Matrix3d>& R) {
  std::vector<Eigen::Matrix3d> global(kJointCount);
  std::vector<Eigen::Vector3d> pos(kJointCount, Eigen::Vector3d::Zero());
  global[0] = R[0];
  for (int j = 1; j < kJointCount; ++j) {
    const int p = skel.parents[j];
    global[j] = global[p] * R[j];
    pos[j] = pos[p] + global[p] * skel.offsets[j];
  }
  return {pos[kLAnkle], pos[kRAnkle]};
}

const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

}  // namespace

void StyleFactor::validate() const {
  if (amplitude_scale < 0.5 || amplitude_scale > 2.0)
    raise(ErrorCode::OutOfRange, "amplitude_scale outside [0.5, 2]");
  if (cadence_scale < 0.5 || cadence_scale > 2.0)
    raise(ErrorCode::OutOfRange, "cadence_scale outside [0.5, 2]");
  if (torso_lean < -0.5 || torso_lean > 0.5) raise(ErrorCode::OutOfRange, "torso_lean outside [-0.5, 0.5]");
}

void ContentFactor::validate() const {
  if (!(speed > 0.0)) raise(ErrorCode::OutOfRange, "content speed must be positive");
}

std::string to_string(Gait gait) {
  switch (gait) {
    case Gait::Walk: return "walk";
    case Gait::Run: return "run";
    case Gait::March: return "march";
    case Gait::KickStep: return "kick-step";
  }
  return "walk";
}

std::vector<StyleFactor> default_styles(int count, std::uint64_t seed) {
  std::vector<StyleFactor> out;
  auto blank = [] { return std::vector<Eigen::Vector3d>(kJointCount, Eigen::Vector3d::Zero()); };
  for (int i = 0; i < count; ++i) {
    StyleFactor s;
    s.style_id = i;
    s.posture_offset = blank();
    switch (i) {
      case 0:
        s.name = "neutral";
        break;
      case 1:
        s.name = "exaggerated";
        s.amplitude_scale = 1.5;
        s.arm_swing_scale = 1.8;
        s.posture_offset[kChest] = {-0.15, 0.0, 0.0};
        s.posture_offset[kLCollar] = {0.0, 0.0, 0.15};
        s.posture_offset[kRCollar] = {0.0, 0.0, -0.15};
        break;
      case 2:
        s.name = "stooped-lean";
        s.amplitude_scale = 0.75;
        s.torso_lean = 0.25;
        s.cadence_scale = 0.85;
        s.arm_swing_scale = 0.6;
        s.posture_offset[kSpine] = {0.35, 0.0, 0.0};
        s.posture_offset[kChest] = {0.25, 0.0, 0.0};
        s.posture_offset[kNeck] = {-0.30, 0.0, 0.0};
        s.posture_offset[kLElbow] = {-0.4, 0.0, 0.0};
        s.posture_offset[kRElbow] = {-0.4, 0.0, 0.0};
        break;
      case 3:
        s.name = "brisk";
        s.cadence_scale = 1.35;
        s.arm_swing_scale = 1.3;
        s.posture_offset[kChest] = {-0.05, 0.0, 0.0};
        s.posture_offset[kHead] = {0.12, 0.0, 0.0};
        s.posture_offset[kLElbow] = {-0.9, 0.0, 0.0};
        s.posture_offset[kRElbow] = {-0.9, 0.0, 0.0};
        break;
      default: {
        std::mt19937_64 rng(splitmix64(seed ^ (0x5157ULL + static_cast<std::uint64_t>(i))));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        s.name = "style" + std::to_string(i);
        s.amplitude_scale = 0.6 + 1.2 * u(rng);
        s.cadence_scale = 0.7 + 0.7 * u(rng);
        s.arm_swing_scale = 0.5 + 1.5 * u(rng);
        s.torso_lean = -0.3 + 0.6 * u(rng);
        for (int j : {kSpine, kChest, kNeck, kHead, kLElbow, kRElbow})
          s.posture_offset[j] = {-0.3 + 0.6 * u(rng), 0.0, 0.0};
        break;
      }
    }
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ContentFactor> default_contents(int count) {
  std::vector<ContentFactor> out;
  for (int i = 0; i < count; ++i) {
    ContentFactor c;
    c.content_id = i;
    c.gait = static_cast<Gait>(i % 4);
    c.speed = gait_params(c.gait).nominal_speed;
    switch (c.gait) {
      case Gait::Walk: c.heading = {0.0, 0.05, 120.0}; break;
      case Gait::Run: c.heading = {0.006, 0.0, 90.0}; break;
      case Gait::March: c.heading = {0.0, 0.0, 90.0}; break;
      case Gait::KickStep: c.heading = {-0.005, 0.08, 80.0}; break;
    }
    if (i >= 4) {
      const int round = i / 4;
      c.heading.rate += 0.004 * (round % 2 == 0 ? 1.0 : -1.0) * round;
      c.speed *= 1.0 + 0.15 * round;
    }
    c.validate();
    out.push_back(c);
  }
  return out;
}

GeneratedClip generate_clip(const ContentFactor& content, const StyleFactor& style, int length,
                            std::uint64_t seed, double fps) {
  if (length < 2) raise(ErrorCode::TooShort, "clip length must be at least 2 frames");
  content.validate();
  style.validate();
  const auto skel = motion::default_skeleton();
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const GaitParams g = gait_params(content.gait);
  const double phase0 = 2.0 * kPi * unit(rng);
  const double amp_jitter = 1.0 + 0.05 * (2.0 * unit(rng) - 1.0);
  const double freq_jitter = 1.0 + 0.04 * (2.0 * unit(rng) - 1.0);
  const double heading_phase = 2.0 * kPi * unit(rng);
  const double amp = style.amplitude_scale * amp_jitter * (content.speed / g.nominal_speed);
  const double cycles_per_frame = g.cycle_hz * style.cadence_scale * freq_jitter / fps;

  std::vector<Eigen::Matrix3d> posture(kJointCount, Eigen::Matrix3d::Identity());
  for (int j = 0; j < kJointCount; ++j) {
    Eigen::Vector3d offset = j < static_cast<int>(style.posture_offset.size())
                                 ? style.posture_offset[j]
                                 : Eigen::Vector3d::Zero();
    if (j >= kSpine) offset += 0.02 * Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    posture[j] = axis_angle(offset);
  }

  MotionState state;
  state.root_yaw.resize(length);
  state.root_position.resize(length);
  state.rotations.resize(length);
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> feet(length);
  for (int t = 0; t < length; ++t) {
    const double phase = phase0 + 2.0 * kPi * cycles_per_frame * t;
    state.rotations[t] = pose_at(phase, g, style, amp, posture);
    feet[t] = ankles(*skel, state.rotations[t]);
    const auto& h = content.heading;
    state.root_yaw[t] = h.rate * t + h.wobble_amplitude * (std::sin(2.0 * kPi * t / h.wobble_period +
                                                                     heading_phase) -
                                                            std::sin(heading_phase));
  }
  // Stance foot stays planted: the lower ankle sits at ground height and its
  // planar world position is carried over from the previous frame.
  auto stance_of = [&](int t) { return feet[t].first.y() <= feet[t].second.y() ? 0 : 1; };
  auto foot = [&](int t, int side) -> const Eigen::Vector3d& {
    return side == 0 ? feet[t].first : feet[t].second;
  };
  for (int t = 0; t < length; ++t) {
    const double height = kAnkleHeight - std::min(feet[t].first.y(), feet[t].second.y());
    Eigen::Vector3d p(0.0, height, 0.0);
    if (t > 0) {
      const int s = stance_of(t - 1);
      const Eigen::Vector3d planted =
          state.root_position[t - 1] + motion::yaw_matrix(state.root_yaw[t - 1]) * foot(t - 1, s);
      const Eigen::Vector3d now = motion::yaw_matrix(state.root_yaw[t]) * foot(t, s);
      p.x() = planted.x() - now.x();
      p.z() = planted.z() - now.z();
    }
    state.root_position[t] = p;
  }

  GeneratedClip clip;
  clip.sequence = motion::featurize(state, skel, fps);
  clip.sequence.style_label = style.style_id;
  clip.sequence.content_label = content.content_id;
  clip.positions = motion::pose_state(state, *skel);
  clip.state = std::move(state);
  return clip;
}

std::vector<const CorpusEntry*> CorpusManifest::split(Split which) const {
  std::vector<const CorpusEntry*> out;
  for (const auto& e : entries)
    if (e.split == which) out.push_back(&e);
  return out;
}

int test_clips_per_cell(int clips_per_cell) {
  if (clips_per_cell < 2) return 0;
  return std::max(1, clips_per_cell / 10);
}

std::uint64_t clip_seed(std::uint64_t corpus_seed, int style, int content, int index) {
  std::uint64_t h = splitmix64(corpus_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(style));
  h = splitmix64(h ^ static_cast<std::uint64_t>(content));
  return splitmix64(h ^ static_cast<std::uint64_t>(index));
}

CorpusManifest plan_corpus(const CorpusSpec& spec) {
  if (spec.n_styles < 1 || spec.n_contents < 1 || spec.clips_per_cell < 1 || spec.length < 2)
    raise(ErrorCode::OutOfRange, "corpus counts must be >= 1 and length >= 2");
  CorpusManifest m;
  m.spec = spec;
  m.styles = default_styles(spec.n_styles, spec.seed);
  m.contents = default_contents(spec.n_contents);
  const int n_test = test_clips_per_cell(spec.clips_per_cell);
  for (int s = 0; s < spec.n_styles; ++s)
    for (int c = 0; c < spec.n_contents; ++c)
      for (int k = 0; k < spec.clips_per_cell; ++k) {
        CorpusEntry e;
        char name[64];
        std::snprintf(name, sizeof(name), "clips/s%02d_c%02d_%03d", s, c, k);
        e.name = name;
        e.style = s;
        e.content = c;
        e.split = k >= spec.clips_per_cell - n_test ? Split::Test : Split::Train;
        e.seed = clip_seed(spec.seed, s, c, k);
        m.entries.push_back(std::move(e));
      }
  return m;
}

namespace {

json style_json(const StyleFactor& s) {
  json offsets = json::array();
  for (const auto& o : s.posture_offset) offsets.push_back({o.x(), o.y(), o.z()});
  return {{"style_id", s.style_id},   {"name", s.name},
          {"amplitude_scale", s.amplitude_scale}, {"torso_lean", s.torso_lean},
          {"cadence_scale", s.cadence_scale},     {"arm_swing_scale", s.arm_swing_scale},
          {"posture_offset", offsets}};
}

StyleFactor style_from_json(const json& j) {
  StyleFactor s;
  s.style_id = j.at("style_id");
  s.name = j.at("name");
  s.amplitude_scale = j.at("amplitude_scale");
  s.torso_lean = j.at("torso_lean");
  s.cadence_scale = j.at("cadence_scale");
  s.arm_swing_scale = j.at("arm_swing_scale");
  for (const auto& o : j.at("posture_offset")) s.posture_offset.emplace_back(o.at(0), o.at(1), o.at(2));
  return s;
}

json content_json(const ContentFactor& c) {
  return {{"content_id", c.content_id},
          {"gait", to_string(c.gait)},
          {"speed", c.speed},
          {"heading", {{"rate", c.heading.rate},
                       {"wobble_amplitude", c.heading.wobble_amplitude},
                       {"wobble_period", c.heading.wobble_period}}}};
}

ContentFactor content_from_json(const json& j) {
  ContentFactor c;
  c.content_id = j.at("content_id");
  const std::string gait = j.at("gait");
  for (Gait g : {Gait::Walk, Gait::Run, Gait::March, Gait::KickStep})
    if (to_string(g) == gait) c.gait = g;
  c.speed = j.at("speed");
  c.heading.rate = j.at("heading").at("rate");
  c.heading.wobble_amplitude = j.at("heading").at("wobble_amplitude");
  c.heading.wobble_period = j.at("heading").at("wobble_period");
  return c;
}

}  // namespace

CorpusManifest generate_corpus(const CorpusSpec& spec, const fs::path& dir) {
  CorpusManifest m = plan_corpus(spec);
  std::error_code ec;
  fs::create_directories(dir / "clips", ec);
  if (ec) raise(ErrorCode::IoError, "cannot create " + (dir / "clips").string());
  json train = json::array();
  json test = json::array();
  json clips = json::array();
  for (const auto& e : m.entries) {
    const auto clip = generate_clip(m.contents[e.content], m.styles[e.style], spec.length, e.seed, spec.fps);
    motion::save_motion(clip.sequence, dir / e.name);
    (e.split == Split::Train ? train : test).push_back(e.name);
    clips.push_back({{"name", e.name}, {"style", e.style}, {"content", e.content},
                     {"split", split_name(e.split)}, {"seed", e.seed}});
  }
  json styles = json::array();
  for (const auto& s : m.styles) styles.push_back(style_json(s));
  json contents = json::array();
  for (const auto& c : m.contents) contents.push_back(content_json(c));
  const json manifest = {
      {"format_version", 1},
      {"spec", {{"n_styles", spec.n_styles}, {"n_contents", spec.n_contents},
                {"clips_per_cell", spec.clips_per_cell}, {"length", spec.length},
                {"seed", spec.seed}, {"fps", spec.fps}}},
      {"styles", styles},
      {"contents", contents},
      {"clips", clips},
      {"splits", {{"train", train}, {"test", test}}},
  };
  std::ofstream out(dir / "corpus.json");
  if (!out) raise(ErrorCode::IoError, "cannot write corpus.json");
  out << manifest.dump(2) << '\n';
  return m;
}

CorpusManifest load_corpus_manifest(const fs::path& dir) {
  std::ifstream in(dir / "corpus.json");
  if (!in) raise(ErrorCode::IoError, "cannot open " + (dir / "corpus.json").string());
  CorpusManifest m;
  try {
    const json j = json::parse(in);
    const auto& s = j.at("spec");
    m.spec.n_styles = s.at("n_styles");
    m.spec.n_contents = s.at("n_contents");
    m.spec.clips_per_cell = s.at("clips_per_cell");
    m.spec.length = s.at("length");
    m.spec.seed = s.at("seed");
    m.spec.fps = s.at("fps");
    for (const auto& st : j.at("styles")) m.styles.push_back(style_from_json(st));
    for (const auto& ct : j.at("contents")) m.contents.push_back(content_from_json(ct));
    for (const auto& c : j.at("clips")) {
      CorpusEntry e;
      e.name = c.at("name");
      e.style = c.at("style");
      e.content = c.at("content");
      e.split = c.at("split") == "test" ? Split::Test : Split::Train;
      e.seed = c.at("seed");
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::BadMagic, std::string("malformed corpus.json: ") + e.what());
  }
  return m;
}

std::vector<motion::PoseSequence> load_split(const fs::path& dir, const CorpusManifest& manifest,
                                             Split which) {
  std::vector<motion::PoseSequence> out;
  for (const auto* e : manifest.split(which)) out.push_back(motion::load_motion(dir / e->name));
  return out;
}

std::vector<motion::PoseSequence> generate_split(const CorpusManifest& manifest, Split which) {
  std::vector<motion::PoseSequence> out;
  for (const auto* e : manifest.split(which))
    out.push_back(generate_clip(manifest.contents[e->content], manifest.styles[e->style],
                                manifest.spec.length, e->seed, manifest.spec.fps)
                      .sequence);
  return out;
}

}  // namespace motionstyle::synth
