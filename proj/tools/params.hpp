#pragma once

#include "motionstyle/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

namespace motionstyle::cli {

using nlohmann::json;

/// Options of one subcommand, resolved as flags > config file > defaults.
/// Keys use snake_case; the matching flag is the kebab-case spelling.
class Params {
 public:
  explicit Params(CLI::App* app);

  /// Valued option. The default's JSON type decides how the flag parses;
  /// options without a default (null) parse as `type`.
  void add(const std::string& key, json def, const std::string& help,
           json::value_t type = json::value_t::string);
  /// Switch that stores `value` under `key` when present.
  void add_switch(const std::string& flag, const std::string& key, bool value, const std::string& help);

  /// Merges `--config` (when given) and the flags into the defaults. Unknown
  /// config keys are a usage error.
  void resolve();

  const json& resolved() const { return values_; }
  bool has(const std::string& key) const { return values_.contains(key) && !values_[key].is_null(); }
  template <typename T>
  T get(const std::string& key) const {
    try {
      return values_.at(key).get<T>();
    } catch (const json::exception&) {
      raise(ErrorCode::Usage, "option '" + key + "' has the wrong type: " + values_.at(key).dump());
    }
  }
  std::filesystem::path path(const std::string& key) const { return get<std::string>(key); }

  /// Writes the resolved options plus `extra` to `dir/resolved_config.json`.
  void snapshot(const std::filesystem::path& dir, const std::string& command, const json& extra = json::object()) const;

 private:
  struct Binding {
    std::string key;
    CLI::Option* option = nullptr;
    std::string* raw = nullptr;
    bool is_switch = false;
    bool switch_value = false;
    json::value_t type = json::value_t::string;
  };

  CLI::App* app_;
  json values_ = json::object();
  std::deque<std::string> storage_;
  std::vector<Binding> bindings_;
  std::string config_path_;
};

/// Default data directory: $MOTIONSTYLE_DATA_DIR, else ./motionstyle_data.
std::filesystem::path data_dir();

}  // namespace motionstyle::cli
