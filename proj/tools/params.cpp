#include "params.hpp"

#include "motionstyle/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace motionstyle::cli {

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

json parse_as(json::value_t type, const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    if (type == json::value_t::number_integer || type == json::value_t::number_unsigned) {
      const long long v = std::stoll(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (type == json::value_t::number_float) {
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (type == json::value_t::boolean) {
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw std::invalid_argument(raw);
    }
  } catch (const std::exception&) {
    raise(ErrorCode::Usage, "invalid value '" + raw + "' for " + flag_name(key));
  }
  return raw;
}

}  // namespace

Params::Params(CLI::App* app) : app_(app) {
  app_->add_option("--config", config_path_, "JSON file of option values (flags take precedence)");
}

void Params::add(const std::string& key, json def, const std::string& help, json::value_t type) {
  storage_.emplace_back();
  auto* opt = app_->add_option(flag_name(key), storage_.back(), help);
  if (!def.is_null()) {
    opt->default_str(def.is_string() ? def.get<std::string>() : def.dump());
    type = def.type();
  }
  values_[key] = std::move(def);
  bindings_.push_back({key, opt, &storage_.back(), false, false, type});
}

void Params::add_switch(const std::string& flag, const std::string& key, bool value, const std::string& help) {
  auto* opt = app_->add_flag("--" + flag, help);
  if (!values_.contains(key)) values_[key] = !value;
  bindings_.push_back({key, opt, nullptr, true, value, json::value_t::boolean});
}

void Params::resolve() {
  if (!config_path_.empty()) {
    std::ifstream in(config_path_);
    if (!in) raise(ErrorCode::IoError, "cannot read config " + config_path_);
    json file;
    try {
      in >> file;
    } catch (const json::exception& e) {
      raise(ErrorCode::Usage, "config " + config_path_ + ": " + e.what());
    }
    if (!file.is_object()) raise(ErrorCode::Usage, "config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!values_.contains(key)) raise(ErrorCode::Usage, "unknown config key '" + key + "'");
      values_[key] = value;
    }
  }
  for (const auto& b : bindings_) {
    if (b.option->count() == 0) continue;
    values_[b.key] = b.is_switch ? json(b.switch_value) : parse_as(b.type, b.key, *b.raw);
  }
}

void Params::snapshot(const std::filesystem::path& dir, const std::string& command, const json& extra) const {
  std::filesystem::create_directories(dir);
  json out = {{"command", command}, {"options", values_}};
  for (const auto& [k, v] : extra.items()) out[k] = v;
  std::ofstream f(dir / "resolved_config.json");
  if (!f) raise(ErrorCode::IoError, "cannot write " + (dir / "resolved_config.json").string());
  f << out.dump(2) << '\n';
}

std::filesystem::path data_dir() {
  const char* env = std::getenv("MOTIONSTYLE_DATA_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("motionstyle_data");
}

}  // namespace motionstyle::cli
