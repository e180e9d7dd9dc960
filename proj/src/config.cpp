#include "hymem/config.hpp"

#include <cstdlib>
#include <fstream>

#include "hymem/mock_providers.hpp"
#include "hymem/remote_providers.hpp"

namespace hymem {

namespace {

const char* const kKnownKeys[] = {"provider",   "embed_endpoint", "judge_endpoint",
                                  "seed",       "k",              "timeout_ms",
                                  "text_dim",   "image_dim",      "block_dim",
                                  "block_len"};

bool known_key(const std::string& key) {
  for (const char* k : kKnownKeys) {
    if (key == k) return true;
  }
  return false;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    uint64_t v = std::stoull(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " needs an unsigned integer, got \"" + value + "\"");
  }
}

void apply(ServiceConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "provider") {
    cfg.provider = value;
  } else if (key == "embed_endpoint") {
    cfg.embed_endpoint = value;
  } else if (key == "judge_endpoint") {
    cfg.judge_endpoint = value;
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "k") {
    cfg.ingest_k = static_cast<size_t>(parse_u64(key, value));
  } else if (key == "timeout_ms") {
    cfg.timeout_ms = static_cast<int>(parse_u64(key, value));
  } else if (key == "text_dim") {
    cfg.params.text_dim = static_cast<uint32_t>(parse_u64(key, value));
  } else if (key == "image_dim") {
    cfg.params.image_dim = static_cast<uint32_t>(parse_u64(key, value));
  } else if (key == "block_dim") {
    cfg.params.block_dim = static_cast<uint32_t>(parse_u64(key, value));
  } else if (key == "block_len") {
    cfg.params.block_len = static_cast<uint32_t>(parse_u64(key, value));
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

std::string env_name(const std::string& key) {
  std::string name = "HYMEM_";
  for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

}  // namespace

void ServiceConfig::validate() const {
  if (provider != "mock" && provider != "remote") {
    throw ConfigError("provider must be mock or remote, got \"" + provider + "\"");
  }
  if (provider == "remote" && (embed_endpoint.empty() || judge_endpoint.empty())) {
    throw ConfigError("remote provider needs embed_endpoint and judge_endpoint");
  }
  params.validate();
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (!known_key(key)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": unknown config key: " + key);
    }
    entries[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return entries;
}

ServiceConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                             const EnvLookup& env) {
  ServiceConfig cfg;
  for (const auto& [key, value] : file_entries) apply(cfg, key, value);
  for (const char* key : kKnownKeys) {
    if (const char* value = env(env_name(key).c_str())) apply(cfg, key, value);
  }
  return cfg;
}

ServiceConfig resolve_config(const std::optional<std::filesystem::path>& config_file) {
  std::map<std::string, std::string> entries;
  if (config_file) entries = parse_config_file(*config_file);
  return resolve_config(entries, [](const char* name) { return std::getenv(name); });
}

std::pair<std::shared_ptr<EncoderProvider>, std::shared_ptr<JudgeProvider>> make_providers(
    const ServiceConfig& config) {
  config.validate();
  if (config.provider == "mock") {
    return {std::make_shared<MockEncoder>(config.seed, config.params),
            std::make_shared<MockJudge>()};
  }
  RemoteConfig embed{config.embed_endpoint, config.timeout_ms};
  RemoteConfig judge{config.judge_endpoint, config.timeout_ms};
  return {std::make_shared<RemoteEncoder>(embed, config.params),
          std::make_shared<RemoteJudge>(judge)};
}

}  // namespace hymem
