#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "hymem/providers.hpp"

namespace hymem {

/// Operational configuration. Resolution precedence, lowest to highest:
/// built-in default < config file (key=value) < HYMEM_* environment variable
/// < CLI flag (applied by the CLI layer on top of the resolved value).
struct ServiceConfig {
  std::string provider = "mock";  // mock | remote
  std::string embed_endpoint;
  std::string judge_endpoint;
  uint64_t seed = 42;
  size_t ingest_k = 5;
  int timeout_ms = 30000;
  StoreParams params;

  void validate() const;  // throws ConfigError
};

// Parses "key=value" lines; '#' starts a comment. Unknown keys are an error
// (they are almost always typos).
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;

// Applies file entries then HYMEM_* env vars over the defaults.
ServiceConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                             const EnvLookup& env);

ServiceConfig resolve_config(const std::optional<std::filesystem::path>& config_file);

// Instantiates the configured provider pair (mock or remote).
std::pair<std::shared_ptr<EncoderProvider>, std::shared_ptr<JudgeProvider>> make_providers(
    const ServiceConfig& config);

}  // namespace hymem
