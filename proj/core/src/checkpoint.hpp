#pragma once

// Shared helpers for the JSON + tensor-blob checkpoint container.

#include "motionstyle/error.hpp"
#include "motionstyle/nn/params.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace motionstyle::checkpoint {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Writes `<dir>/<kind>.json` (with format/version stamps added) and
/// `<dir>/<kind>.bin`.
void save(const std::filesystem::path& dir, const std::string& kind, nlohmann::json meta,
          const nn::TensorMap& tensors);

/// Reads and validates `<dir>/<kind>.json`; throws IoError, BadMagic or
/// UnsupportedVersion.
nlohmann::json load_meta(const std::filesystem::path& dir, const std::string& kind);

nn::TensorMap load_tensors(const std::filesystem::path& dir, const std::string& kind);

}  // namespace motionstyle::checkpoint
