#include "hymem/remote_providers.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hymem/hash.hpp"
#include "hymem/wire_json.hpp"

namespace hymem {

namespace {

using nlohmann::json;

// One POST with bounded retries. Returns the body on HTTP 200, empty
// optional otherwise.
std::optional<std::string> post_with_retries(const RemoteConfig& cfg, const std::string& path,
                                             const std::string& body) {
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg.backoff_base_ms << (attempt - 1)));
    }
    httplib::Client client(cfg.endpoint);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    client.set_write_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    auto res = client.Post(path, body, "application/json");
    if (res && res->status == 200) return res->body;
  }
  return std::nullopt;
}

}  // namespace

RemoteEncoder::RemoteEncoder(RemoteConfig cfg, StoreParams params)
    : cfg_(std::move(cfg)), params_(params) {
  params_.validate();
}

std::vector<std::vector<float>> RemoteEncoder::request_vectors(const std::string& kind,
                                                               const std::string& payload_json,
                                                               size_t expect_count,
                                                               size_t expect_dim) {
  json request;
  request["kind"] = kind;
  request["payload"] = json::parse(payload_json);
  std::string body = request.dump();

  uint64_t key = fnv1a64(body);
  std::string response;
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) response = it->second;
  }
  if (response.empty()) {
    auto fetched = post_with_retries(cfg_, "/embed", body);
    if (!fetched) {
      throw EncoderFailure("embedding service at " + cfg_.endpoint + " failed for kind " + kind);
    }
    response = *fetched;
    std::lock_guard<std::mutex> lock(cache_mu_);
    cache_.emplace(key, response);
  }

  json parsed = json::parse(response, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("vectors") || !parsed["vectors"].is_array()) {
    throw EncoderFailure("embedding service returned no vectors for kind " + kind);
  }
  std::vector<std::vector<float>> vectors;
  for (const json& row : parsed["vectors"]) {
    if (!row.is_array()) throw EncoderFailure("embedding row is not an array");
    std::vector<float> v;
    v.reserve(row.size());
    for (const json& x : row) v.push_back(x.get<float>());
    vectors.push_back(std::move(v));
  }
  if (vectors.size() != expect_count) {
    throw EncoderFailure("embedding service returned " + std::to_string(vectors.size()) +
                         " vectors, expected " + std::to_string(expect_count));
  }
  for (const auto& v : vectors) {
    if (v.size() != expect_dim) {
      throw EncoderFailure("embedding dim " + std::to_string(v.size()) + ", expected " +
                           std::to_string(expect_dim));
    }
  }
  return vectors;
}

std::vector<float> RemoteEncoder::embed_text(const std::string& text) {
  return request_vectors("text", json(text).dump(), 1, params_.text_dim)[0];
}

std::vector<float> RemoteEncoder::embed_image(const ImageRef& image) {
  return request_vectors("image", image_ref_to_json(image).dump(), 1, params_.image_dim)[0];
}

EmbeddingBlock RemoteEncoder::embed_trajectory(const TrajectoryRecord& traj) {
  EmbeddingBlock block;
  block.encoder_id = "remote:" + cfg_.endpoint;
  block.vectors = request_vectors("trajectory", trajectory_to_json(traj).dump(),
                                  params_.block_len, params_.block_dim);
  return block;
}

std::string RemoteJudge::complete(const RenderedPrompt& prompt) {
  json request;
  request["prompt"] = prompt.full_text();
  request["images"] = prompt.image_uris;
  std::string body = request.dump();

  uint64_t key = fnv1a64(body);
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto fetched = post_with_retries(cfg_, "/complete", body);
  if (!fetched) throw JudgeFailure("judge service at " + cfg_.endpoint + " failed");

  json parsed = json::parse(*fetched, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("text") || !parsed["text"].is_string()) {
    throw JudgeFailure("judge service returned no text field");
  }
  std::string text = parsed["text"].get<std::string>();
  std::lock_guard<std::mutex> lock(cache_mu_);
  cache_.emplace(key, text);
  return text;
}

std::string RemoteJudge::judge_evolution(const CandidateView& incoming,
                                         const std::vector<CandidateView>& neighbors) {
  return complete(render_evolution_prompt(incoming, neighbors));
}

std::string RemoteJudge::judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                                       const ImageRef& cur_obs, const std::string& guidance,
                                       const std::vector<TakeawayRef>& takeaways) {
  return complete(render_refresh_prompt(task_text, prev_obs, cur_obs, guidance, takeaways));
}

std::string RemoteJudge::digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                                         const std::vector<std::string>& summaries) {
  return complete(render_digestion_prompt(task_text, cur_obs, summaries));
}

std::string RemoteJudge::summarize_strategy(const TrajectoryRecord& traj) {
  RenderedPrompt p;
  p.system =
      "You analyze GUI agent trajectories and write one concise takeaway sentence\n"
      "describing the high-level strategy that solved the task.";
  std::string actions;
  for (size_t i = 0; i < traj.actions.size(); ++i) {
    actions += std::to_string(i + 1) + ". " + traj.actions[i].name;
    if (!traj.actions[i].argument.empty()) actions += "(" + traj.actions[i].argument + ")";
    actions += "\n";
  }
  p.user = "Task:\n" + traj.task_text + "\n\nActions:\n" + actions +
           "\nWrite the strategy as a single sentence starting with \"takeaway:\".";
  if (!traj.observations.empty()) p.image_uris.push_back(traj.observations.front().uri);
  return complete(p);
}

std::string RemoteJudge::extract_tags_raw(const std::string& strategy) {
  RenderedPrompt p;
  p.system =
      "You label GUI agent strategies with short semantic tags covering actions,\n"
      "UI elements, and domain concepts.";
  p.user = "Strategy:\n" + strategy +
           "\n\nList 3 to 6 tags, comma-separated, each starting with '#' (use '$' for "
           "value-like concepts such as $price).";
  return complete(p);
}

}  // namespace hymem
