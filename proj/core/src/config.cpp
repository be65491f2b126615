#include "uqsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#define TOML_FLOAT_CHARCONV 1  // shortest round-trip floats in --print-config
#include <toml.hpp>

#include "uqsched/errors.hpp"

namespace uqsched {

void AppConfig::validate() const {
  analysis.validate();
  predictor.validate();
  if (service.port < 0 || service.port > 65535) {
    throw DomainError("service.port must lie in [0, 65535]");
  }
}

namespace {

void reject_unknown(const toml::table& table, std::string_view name, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : table) {
    if (allowed.count(std::string(key.str())) == 0) {
      throw FormatError("unknown config key '" + std::string(name) + "." + std::string(key.str()) + "'");
    }
  }
}

const toml::table* subtable(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (node == nullptr) {
    return nullptr;
  }
  if (!node->is_table()) {
    throw FormatError("config entry '" + std::string(name) + "' must be a table");
  }
  return node->as_table();
}

double read_real(const toml::table& t, std::string_view table_name, std::string_view key, double fallback) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    return fallback;
  }
  if (auto v = node->value<double>()) {  // accepts integers too
    return *v;
  }
  throw FormatError("config key '" + std::string(table_name) + "." + std::string(key) + "' must be a number");
}

std::int64_t read_int(const toml::table& t, std::string_view table_name, std::string_view key,
                      std::int64_t fallback) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    return fallback;
  }
  if (!node->is_integer()) {
    throw FormatError("config key '" + std::string(table_name) + "." + std::string(key) + "' must be an integer");
  }
  return *node->value<std::int64_t>();
}

bool read_bool(const toml::table& t, std::string_view table_name, std::string_view key, bool fallback) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    return fallback;
  }
  if (!node->is_boolean()) {
    throw FormatError("config key '" + std::string(table_name) + "." + std::string(key) + "' must be a boolean");
  }
  return *node->value<bool>();
}

std::string read_string(const toml::table& t, std::string_view table_name, std::string_view key,
                        const std::string& fallback) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    return fallback;
  }
  if (!node->is_string()) {
    throw FormatError("config key '" + std::string(table_name) + "." + std::string(key) + "' must be a string");
  }
  return *node->value<std::string>();
}

std::size_t read_count(const toml::table& t, std::string_view table_name, std::string_view key,
                       std::size_t fallback) {
  const auto v = read_int(t, table_name, key, static_cast<std::int64_t>(fallback));
  if (v < 0) {
    throw DomainError("config key '" + std::string(table_name) + "." + std::string(key) + "' must be >= 0");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

AppConfig parse_config(std::string_view toml_text, AppConfig base) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw FormatError(std::string("invalid TOML config: ") + std::string(e.description()));
  }
  reject_unknown(root, "", {"analysis", "predictor", "service", "paths"});

  AppConfig c = std::move(base);
  if (const auto* t = subtable(root, "analysis")) {
    reject_unknown(*t, "analysis", {"sample_threshold", "subset_target_size", "trust", "epsilon_raw", "normalize_area"});
    c.analysis.sample_threshold = read_count(*t, "analysis", "sample_threshold", c.analysis.sample_threshold);
    c.analysis.subset_target_size = read_count(*t, "analysis", "subset_target_size", c.analysis.subset_target_size);
    c.analysis.trust = read_real(*t, "analysis", "trust", c.analysis.trust);
    if (t->contains("epsilon_raw")) {
      c.analysis.epsilon_raw = read_real(*t, "analysis", "epsilon_raw", 0.0);
    }
    c.analysis.normalize_area = read_bool(*t, "analysis", "normalize_area", c.analysis.normalize_area);
  }
  if (const auto* t = subtable(root, "predictor")) {
    reject_unknown(*t, "predictor",
                   {"noise_std", "length_scale", "alpha", "signal_var", "optimize", "min_train_size"});
    c.predictor.noise_std = read_real(*t, "predictor", "noise_std", c.predictor.noise_std);
    c.predictor.length_scale = read_real(*t, "predictor", "length_scale", c.predictor.length_scale);
    c.predictor.alpha = read_real(*t, "predictor", "alpha", c.predictor.alpha);
    if (t->contains("signal_var")) {
      c.predictor.signal_var = read_real(*t, "predictor", "signal_var", 0.0);
    }
    c.predictor.optimize = read_bool(*t, "predictor", "optimize", c.predictor.optimize);
    c.predictor.min_train_size = read_count(*t, "predictor", "min_train_size", c.predictor.min_train_size);
  }
  if (const auto* t = subtable(root, "service")) {
    reject_unknown(*t, "service", {"host", "port", "cors_origin"});
    c.service.host = read_string(*t, "service", "host", c.service.host);
    c.service.port = static_cast<int>(read_int(*t, "service", "port", c.service.port));
    c.service.cors_origin = read_string(*t, "service", "cors_origin", c.service.cors_origin);
  }
  if (const auto* t = subtable(root, "paths")) {
    reject_unknown(*t, "paths", {"snapshot", "models"});
    c.snapshot_path = read_string(*t, "paths", "snapshot", c.snapshot_path);
    c.models_path = read_string(*t, "paths", "models", c.models_path);
  }
  c.validate();
  return c;
}

AppConfig load_config_file(const std::filesystem::path& path, AppConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::string to_toml(const AppConfig& c) {
  toml::table analysis{
      {"sample_threshold", static_cast<std::int64_t>(c.analysis.sample_threshold)},
      {"subset_target_size", static_cast<std::int64_t>(c.analysis.subset_target_size)},
      {"trust", c.analysis.trust},
      {"normalize_area", c.analysis.normalize_area},
  };
  if (c.analysis.epsilon_raw) {
    analysis.insert("epsilon_raw", *c.analysis.epsilon_raw);
  }
  toml::table predictor{
      {"noise_std", c.predictor.noise_std},
      {"length_scale", c.predictor.length_scale},
      {"alpha", c.predictor.alpha},
      {"optimize", c.predictor.optimize},
      {"min_train_size", static_cast<std::int64_t>(c.predictor.min_train_size)},
  };
  if (c.predictor.signal_var) {
    predictor.insert("signal_var", *c.predictor.signal_var);
  }
  toml::table root{
      {"analysis", std::move(analysis)},
      {"predictor", std::move(predictor)},
      {"service",
       toml::table{{"host", c.service.host},
                   {"port", static_cast<std::int64_t>(c.service.port)},
                   {"cors_origin", c.service.cors_origin}}},
      {"paths", toml::table{{"snapshot", c.snapshot_path}, {"models", c.models_path}}},
  };
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

}  // namespace uqsched
