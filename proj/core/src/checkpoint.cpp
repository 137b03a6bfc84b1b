#include "checkpoint.hpp"

#include <fstream>

namespace motionstyle::checkpoint {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::BadMagic, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void save(const fs::path& dir, const std::string& kind, json meta, const nn::TensorMap& tensors) {
  fs::create_directories(dir);
  meta["format_version"] = kFormatVersion;
  meta["kind"] = kind;
  meta["library_version"] = kLibraryVersion;
  meta["weights"] = kind + ".bin";
  write_json(dir / (kind + ".json"), meta);
  nn::write_tensor_blob(dir / (kind + ".bin"), tensors);
}

json load_meta(const fs::path& dir, const std::string& kind) {
  json meta = read_json(dir / (kind + ".json"));
  if (!meta.contains("format_version") || meta.value("kind", "") != kind)
    raise(ErrorCode::BadMagic, (dir / (kind + ".json")).string() + " is not a " + kind + " checkpoint");
  if (meta["format_version"] != kFormatVersion)
    raise(ErrorCode::UnsupportedVersion, "unsupported " + kind + " checkpoint version");
  return meta;
}

nn::TensorMap load_tensors(const fs::path& dir, const std::string& kind) {
  return nn::read_tensor_blob(dir / (kind + ".bin"));
}

}  // namespace motionstyle::checkpoint
