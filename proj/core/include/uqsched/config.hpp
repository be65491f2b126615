#ifndef UQSCHED_CONFIG_HPP
#define UQSCHED_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "uqsched/predictor.hpp"
#include "uqsched/scheduler.hpp"

namespace uqsched {

struct ServiceSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

/// Fully resolved settings for a CLI run or a service instance.
struct AppConfig {
  AnalysisConfig analysis;
  PredictorConfig predictor;
  ServiceSettings service;
  std::string snapshot_path;
  std::string models_path;

  /// Throws DomainError on any out-of-range value.
  void validate() const;
};

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "UQSCHED_CONFIG";

/// Overlays TOML text onto `base`. Recognized tables: [analysis],
/// [predictor], [service], [paths]. Unknown keys or wrong types raise
/// FormatError; the merged result is validated.
AppConfig parse_config(std::string_view toml_text, AppConfig base = {});

/// parse_config on a file; IoError if unreadable.
AppConfig load_config_file(const std::filesystem::path& path, AppConfig base = {});

/// Renders the effective configuration as TOML (round-trips through parse_config).
std::string to_toml(const AppConfig& config);

}  // namespace uqsched

#endif  // UQSCHED_CONFIG_HPP
