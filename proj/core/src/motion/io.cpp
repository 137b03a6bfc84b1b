#include "motionstyle/motion/io.hpp"

#include "motionstyle/error.hpp"

#include <json.hpp>

#include <bit>
#include <fstream>

namespace motionstyle::motion {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "motion payloads are little-endian float32");

namespace {

json read_json(const fs::path& path, ErrorCode parse_error) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(parse_error, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

fs::path motion_base(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".json" || ext == ".f32") return fs::path(path).replace_extension();
  return path;
}

void save_motion(const PoseSequence& seq, const fs::path& path) {
  const fs::path base = motion_base(path);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  json manifest = {
      {"format_version", kMotionFormatVersion},
      {"fps", seq.fps},
      {"joint_count", seq.layout().joints},
      {"feature_dim", seq.feature_dim()},
      {"frame_count", seq.frame_count()},
      {"skeleton_id", seq.skeleton ? seq.skeleton->id : std::string("default21")},
      {"normalized", seq.normalized},
  };
  if (seq.style_label) manifest["style_label"] = *seq.style_label;
  if (seq.content_label) manifest["content_label"] = *seq.content_label;
  write_json(fs::path(base).concat(".json"), manifest);

  const fs::path payload = fs::path(base).concat(".f32");
  std::ofstream out(payload, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write " + payload.string());
  out.write(reinterpret_cast<const char*>(seq.frames.data()),
            static_cast<std::streamsize>(seq.frames.size() * sizeof(float)));
  if (!out) raise(ErrorCode::IoError, "write failed: " + payload.string());
}

PoseSequence load_motion(const fs::path& path, std::shared_ptr<const Skeleton> skeleton) {
  const fs::path base = motion_base(path);
  const fs::path manifest_path = fs::path(base).concat(".json");
  const json manifest = read_json(manifest_path, ErrorCode::BadMagic);
  if (!manifest.is_object() || !manifest.contains("format_version"))
    raise(ErrorCode::BadMagic, manifest_path.string() + " is not a motion manifest");
  if (manifest["format_version"] != kMotionFormatVersion)
    raise(ErrorCode::UnsupportedVersion, "unsupported motion format_version in " + manifest_path.string());

  PoseSequence seq;
  int frames = 0;
  int dim = 0;
  int joints = 0;
  std::string skeleton_id;
  try {
    seq.fps = manifest.at("fps").get<double>();
    joints = manifest.at("joint_count").get<int>();
    dim = manifest.at("feature_dim").get<int>();
    frames = manifest.at("frame_count").get<int>();
    skeleton_id = manifest.at("skeleton_id").get<std::string>();
    seq.normalized = manifest.at("normalized").get<bool>();
    if (manifest.contains("style_label") && !manifest["style_label"].is_null())
      seq.style_label = manifest["style_label"].get<int>();
    if (manifest.contains("content_label") && !manifest["content_label"].is_null())
      seq.content_label = manifest["content_label"].get<int>();
  } catch (const json::exception& e) {
    raise(ErrorCode::BadMagic, "manifest field error in " + manifest_path.string() + ": " + e.what());
  }
  if (frames < 0 || dim != PoseLayout{joints}.dim())
    raise(ErrorCode::ShapeMismatch, "feature_dim does not match joint_count in " + manifest_path.string());

  if (!skeleton) {
    if (skeleton_id == default_skeleton()->id) {
      skeleton = default_skeleton();
    } else {
      skeleton = load_skeleton(base.parent_path() / (skeleton_id + ".skeleton.json"));
    }
  }
  if (skeleton->joint_count() != joints)
    raise(ErrorCode::ShapeMismatch, "skeleton joint count differs from manifest");
  seq.skeleton = std::move(skeleton);

  const fs::path payload = fs::path(base).concat(".f32");
  std::error_code ec;
  const auto bytes = fs::file_size(payload, ec);
  if (ec) raise(ErrorCode::IoError, "cannot stat " + payload.string());
  const auto expected = static_cast<std::uintmax_t>(frames) * dim * sizeof(float);
  if (bytes != expected)
    raise(ErrorCode::ShapeMismatch, payload.string() + ": payload holds " + std::to_string(bytes) +
                                        " bytes, header implies " + std::to_string(expected));
  seq.frames.resize(frames, dim);
  std::ifstream in(payload, std::ios::binary);
  in.read(reinterpret_cast<char*>(seq.frames.data()), static_cast<std::streamsize>(expected));
  if (!in) raise(ErrorCode::IoError, "read failed: " + payload.string());
  return seq;
}

void save_skeleton(const Skeleton& skeleton, const fs::path& path) {
  json offsets = json::array();
  for (const auto& o : skeleton.offsets) offsets.push_back({o.x(), o.y(), o.z()});
  json pairs = json::array();
  for (const auto& [l, r] : skeleton.mirror_pairs) pairs.push_back({l, r});
  write_json(path, {{"id", skeleton.id},
                    {"parents", skeleton.parents},
                    {"offsets", offsets},
                    {"foot_joints", skeleton.foot_joints},
                    {"mirror_pairs", pairs},
                    {"height", skeleton.height}});
}

std::shared_ptr<const Skeleton> load_skeleton(const fs::path& path) {
  const json j = read_json(path, ErrorCode::BadMagic);
  auto s = std::make_shared<Skeleton>();
  try {
    s->id = j.value("id", path.stem().string());
    s->parents = j.at("parents").get<std::vector<int>>();
    for (const auto& o : j.at("offsets")) s->offsets.emplace_back(o.at(0), o.at(1), o.at(2));
    s->foot_joints = j.at("foot_joints").get<std::array<int, 4>>();
    for (const auto& p : j.at("mirror_pairs")) s->mirror_pairs.emplace_back(p.at(0), p.at(1));
    s->height = j.value("height", 0.0);
  } catch (const json::exception& e) {
    raise(ErrorCode::BadMagic, "malformed skeleton file " + path.string() + ": " + e.what());
  }
  s->validate();
  return s;
}

void save_norm_stats(const NormStats& stats, const fs::path& path) {
  std::vector<float> mean(stats.mean.data(), stats.mean.data() + stats.mean.size());
  std::vector<float> sd(stats.std.data(), stats.std.data() + stats.std.size());
  write_json(path, {{"format_version", 1}, {"mean", mean}, {"std", sd}});
}

NormStats load_norm_stats(const fs::path& path) {
  const json j = read_json(path, ErrorCode::BadMagic);
  if (!j.contains("mean") || !j.contains("std")) raise(ErrorCode::BadMagic, "not a norm-stats file");
  const auto mean = j.at("mean").get<std::vector<float>>();
  const auto sd = j.at("std").get<std::vector<float>>();
  if (mean.size() != sd.size()) raise(ErrorCode::ShapeMismatch, "norm-stats mean/std lengths differ");
  NormStats stats;
  stats.mean = Eigen::Map<const Eigen::VectorXf>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  stats.std = Eigen::Map<const Eigen::VectorXf>(sd.data(), static_cast<Eigen::Index>(sd.size()));
  return stats;
}

}  // namespace motionstyle::motion
