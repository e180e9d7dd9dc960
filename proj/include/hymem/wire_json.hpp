#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hymem/evolution.hpp"
#include "hymem/retrieval.hpp"
#include "hymem/types.hpp"
#include "hymem/working_memory.hpp"

namespace hymem {

// Trajectory wire schema (one JSONL line / request body):
//   {"id","task_text","observations":[{"uri","sha256"}...],
//    "actions":[{"name","argument"}...],"domain_tag","source"}
// Parse errors throw InvalidTrajectory naming the offending field.
TrajectoryRecord trajectory_from_json(const nlohmann::json& j);
nlohmann::json trajectory_to_json(const TrajectoryRecord& traj);
TrajectoryRecord trajectory_from_jsonl_line(const std::string& line);

nlohmann::json image_ref_to_json(const ImageRef& image);
ImageRef image_ref_from_json(const nlohmann::json& j);

std::string hex_encode(const uint8_t* data, size_t len);
bool hex_decode(std::string_view hex, uint8_t* out, size_t out_len);

// base64 of the block's vectors as little-endian f32, row-major.
std::string embedding_block_to_base64(const EmbeddingBlock& block);
EmbeddingBlock embedding_block_from_base64(const std::string& b64, const std::string& encoder_id,
                                           uint32_t block_dim, uint32_t block_len);

std::string base64_encode(const uint8_t* data, size_t len);
std::vector<uint8_t> base64_decode(std::string_view b64);  // throws ConfigError

// Partial config object {"n_total","n_seed","expand_per_seed","iterations"};
// absent keys keep the defaults passed in.
RetrievalConfig retrieval_config_from_json(const nlohmann::json& j, RetrievalConfig defaults);

nlohmann::json retrieval_result_to_json(const RetrievalResult& result);
nlohmann::json ingest_report_to_json(const IngestReport& report);
nlohmann::json stats_to_json(const GraphStats& stats);
nlohmann::json working_memory_to_json(const WorkingMemory& wm);
nlohmann::json refresh_outcome_to_json(const RefreshOutcome& outcome);

}  // namespace hymem
