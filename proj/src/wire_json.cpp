#include "hymem/wire_json.hpp"

#include <cstring>

namespace hymem {

namespace {

using nlohmann::json;

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw InvalidTrajectory(std::string("missing field: ") + field);
  return *it;
}

std::string require_string(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_string()) throw InvalidTrajectory(std::string("field is not a string: ") + field);
  return v.get<std::string>();
}

}  // namespace

std::string hex_encode(const uint8_t* data, size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

bool hex_decode(std::string_view hex, uint8_t* out, size_t out_len) {
  if (hex.size() != out_len * 2) return false;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (size_t i = 0; i < out_len; ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return true;
}

std::string base64_encode(const uint8_t* data, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    uint32_t chunk = static_cast<uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= data[i + 2];
    out.push_back(kB64Alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kB64Alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(std::string_view b64) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (b64.size() % 4 != 0) throw ConfigError("base64 length must be a multiple of 4");
  std::vector<uint8_t> out;
  out.reserve(b64.size() / 4 * 3);
  for (size_t i = 0; i < b64.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (size_t k = 0; k < 4; ++k) {
      char c = b64[i + k];
      if (c == '=') {
        if (i + 4 != b64.size()) throw ConfigError("base64 padding in the middle");
        vals[k] = 0;
        ++pad;
      } else {
        vals[k] = value_of(c);
        if (vals[k] < 0) throw ConfigError("invalid base64 character");
        if (pad > 0) throw ConfigError("base64 data after padding");
      }
    }
    if (pad > 2) throw ConfigError("base64 group over-padded");
    uint32_t chunk = (static_cast<uint32_t>(vals[0]) << 18) |
                     (static_cast<uint32_t>(vals[1]) << 12) |
                     (static_cast<uint32_t>(vals[2]) << 6) | static_cast<uint32_t>(vals[3]);
    out.push_back(static_cast<uint8_t>((chunk >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<uint8_t>((chunk >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<uint8_t>(chunk & 0xff));
  }
  return out;
}

nlohmann::json image_ref_to_json(const ImageRef& image) {
  json j;
  j["uri"] = image.uri;
  j["sha256"] = hex_encode(image.content_hash.data(), image.content_hash.size());
  return j;
}

ImageRef image_ref_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidTrajectory("observation entry is not an object");
  ImageRef image;
  image.uri = require_string(j, "uri");
  std::string hex = require_string(j, "sha256");
  if (!hex_decode(hex, image.content_hash.data(), image.content_hash.size())) {
    throw InvalidTrajectory("field sha256 must be 64 hex characters");
  }
  return image;
}

TrajectoryRecord trajectory_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidTrajectory("trajectory is not a JSON object");
  TrajectoryRecord traj;
  traj.id = require_string(j, "id");
  traj.task_text = require_string(j, "task_text");

  const json& obs = require(j, "observations");
  if (!obs.is_array() || obs.empty()) {
    throw InvalidTrajectory("field observations must be a non-empty array");
  }
  for (const json& entry : obs) traj.observations.push_back(image_ref_from_json(entry));

  if (auto it = j.find("actions"); it != j.end()) {
    if (!it->is_array()) throw InvalidTrajectory("field actions must be an array");
    for (const json& entry : *it) {
      if (!entry.is_object()) throw InvalidTrajectory("action entry is not an object");
      ActionStep step;
      step.name = require_string(entry, "name");
      if (auto arg = entry.find("argument"); arg != entry.end() && arg->is_string()) {
        step.argument = arg->get<std::string>();
      }
      traj.actions.push_back(std::move(step));
    }
  }
  if (auto it = j.find("domain_tag"); it != j.end() && it->is_string()) {
    traj.domain_tag = it->get<std::string>();
  }
  if (auto it = j.find("source"); it != j.end()) {
    if (!it->is_string()) throw InvalidTrajectory("field source must be a string");
    traj.source = trajectory_source_from_string(it->get<std::string>());
  }
  traj.validate();
  return traj;
}

nlohmann::json trajectory_to_json(const TrajectoryRecord& traj) {
  json j;
  j["id"] = traj.id;
  j["task_text"] = traj.task_text;
  json obs = json::array();
  for (const ImageRef& o : traj.observations) obs.push_back(image_ref_to_json(o));
  j["observations"] = std::move(obs);
  json actions = json::array();
  for (const ActionStep& a : traj.actions) {
    actions.push_back({{"name", a.name}, {"argument", a.argument}});
  }
  j["actions"] = std::move(actions);
  j["domain_tag"] = traj.domain_tag;
  j["source"] = std::string(to_string(traj.source));
  return j;
}

TrajectoryRecord trajectory_from_jsonl_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw InvalidTrajectory("line is not valid JSON");
  return trajectory_from_json(j);
}

std::string embedding_block_to_base64(const EmbeddingBlock& block) {
  std::vector<uint8_t> bytes;
  size_t dim = block.vectors.empty() ? 0 : block.vectors.front().size();
  bytes.reserve(block.vectors.size() * dim * sizeof(float));
  for (const auto& row : block.vectors) {
    for (float f : row) {
      uint32_t bits;
      std::memcpy(&bits, &f, sizeof(bits));
      bytes.push_back(static_cast<uint8_t>(bits & 0xff));
      bytes.push_back(static_cast<uint8_t>((bits >> 8) & 0xff));
      bytes.push_back(static_cast<uint8_t>((bits >> 16) & 0xff));
      bytes.push_back(static_cast<uint8_t>((bits >> 24) & 0xff));
    }
  }
  return base64_encode(bytes.data(), bytes.size());
}

EmbeddingBlock embedding_block_from_base64(const std::string& b64, const std::string& encoder_id,
                                           uint32_t block_dim, uint32_t block_len) {
  std::vector<uint8_t> bytes = base64_decode(b64);
  size_t expected = static_cast<size_t>(block_dim) * block_len * sizeof(float);
  if (bytes.size() != expected) {
    throw DimMismatch("embedding payload holds " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(expected));
  }
  EmbeddingBlock block;
  block.encoder_id = encoder_id;
  size_t offset = 0;
  for (uint32_t i = 0; i < block_len; ++i) {
    std::vector<float> row(block_dim);
    for (uint32_t d = 0; d < block_dim; ++d) {
      uint32_t bits = bytes[offset] | (static_cast<uint32_t>(bytes[offset + 1]) << 8) |
                      (static_cast<uint32_t>(bytes[offset + 2]) << 16) |
                      (static_cast<uint32_t>(bytes[offset + 3]) << 24);
      std::memcpy(&row[d], &bits, sizeof(bits));
      offset += 4;
    }
    block.vectors.push_back(std::move(row));
  }
  return block;
}

RetrievalConfig retrieval_config_from_json(const nlohmann::json& j, RetrievalConfig defaults) {
  RetrievalConfig cfg = defaults;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto read = [&](const char* field, size_t& target) {
    auto it = j.find(field);
    if (it == j.end()) return;
    if (!it->is_number_unsigned()) {
      throw ConfigError(std::string("config field must be a non-negative integer: ") + field);
    }
    target = it->get<size_t>();
  };
  read("n_total", cfg.n_total);
  read("n_seed", cfg.n_seed);
  read("expand_per_seed", cfg.expand_per_seed);
  read("iterations", cfg.iterations);
  cfg.validate();
  return cfg;
}

nlohmann::json retrieval_result_to_json(const RetrievalResult& result) {
  json items = json::array();
  for (const RetrievedItem& item : result.items) {
    items.push_back({{"node_id", item.node_id},
                     {"origin", to_string(item.origin)},
                     {"score", item.score}});
  }
  return json{{"items", std::move(items)}};
}

nlohmann::json ingest_report_to_json(const IngestReport& report) {
  json neighbors = json::array();
  for (const auto& [id, sim] : report.neighbors_considered) {
    neighbors.push_back({{"node_id", id}, {"similarity", sim}});
  }
  json j{{"action", std::string(to_string(report.decision.action))},
         {"node_id", report.node_id},
         {"reasoning", report.decision.reasoning},
         {"neighbors_considered", std::move(neighbors)},
         {"forced_add", report.forced_add},
         {"fallback_used", report.fallback_used}};
  if (report.fallback_used) j["parse_error"] = report.parse_error;
  return j;
}

nlohmann::json stats_to_json(const GraphStats& stats) {
  return json{{"node_count", stats.node_count},
              {"distinct_tag_count", stats.distinct_tag_count},
              {"derived_edge_count", stats.derived_edge_count},
              {"merge_total", stats.merge_total},
              {"replace_total", stats.replace_total}};
}

nlohmann::json working_memory_to_json(const WorkingMemory& wm) {
  json takeaways = json::array();
  for (const TakeawayRef& t : wm.takeaways) {
    takeaways.push_back({{"id", t.id}, {"text", t.text}});
  }
  json blocks = json::array();
  for (const EmbeddingBlock& block : wm.embedding_blocks) {
    blocks.push_back({{"encoder_id", block.encoder_id},
                      {"dim", block.vectors.empty() ? 0 : block.vectors.front().size()},
                      {"count", block.vectors.size()},
                      {"data", embedding_block_to_base64(block)}});
  }
  return json{{"wm_id", wm.wm_id},
              {"task_text", wm.task_text},
              {"guidance", wm.guidance},
              {"guidance_fallback", wm.guidance_fallback},
              {"attached_nodes", wm.attached_nodes},
              {"takeaways", std::move(takeaways)},
              {"embedding_blocks", std::move(blocks)},
              {"phase", wm.phase}};
}

nlohmann::json refresh_outcome_to_json(const RefreshOutcome& outcome) {
  json j{{"status", outcome.refreshed ? "refreshed" : "kept"},
         {"malformed_judge_output", outcome.malformed_judge_output},
         {"reason", outcome.decision.reason}};
  j["working_memory"] = working_memory_to_json(outcome.wm);
  return j;
}

}  // namespace hymem
