#include "hymem/mock_providers.hpp"

#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "hymem/hash.hpp"

namespace hymem {

uint64_t image_ref_hash(const ImageRef& image) {
  uint64_t h = fnv1a64(image.uri);
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(image.content_hash.data()),
                                  image.content_hash.size()),
                 h);
}

uint64_t trajectory_content_hash(const TrajectoryRecord& traj) {
  uint64_t h = fnv1a64(traj.task_text);
  for (const ImageRef& obs : traj.observations) {
    h = splitmix64(h ^ image_ref_hash(obs));
  }
  for (const ActionStep& step : traj.actions) {
    h = fnv1a64(step.argument, fnv1a64(step.name, h));
  }
  h = fnv1a64(traj.domain_tag, h);
  return h;
}

MockEncoder::MockEncoder(uint64_t seed, StoreParams params) : seed_(seed), params_(params) {
  params_.validate();
}

std::vector<float> MockEncoder::vector_from(uint64_t content_hash, uint64_t stream,
                                            uint32_t dim, bool normalize) const {
  std::vector<float> v(dim);
  uint64_t state = splitmix64(seed_ ^ splitmix64(content_hash ^ stream));
  double acc = 0.0;
  for (uint32_t i = 0; i < dim; ++i) {
    state = splitmix64(state);
    double x = to_unit_interval(state);
    v[i] = static_cast<float>(x);
    acc += x * x;
  }
  if (normalize) {
    double norm = std::sqrt(acc);
    for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
  }
  return v;
}

std::vector<float> MockEncoder::embed_text(const std::string& text) {
  return vector_from(fnv1a64(text), /*stream=*/0x74657874, params_.text_dim, true);
}

std::vector<float> MockEncoder::embed_image(const ImageRef& image) {
  return vector_from(image_ref_hash(image), /*stream=*/0x696d6167, params_.image_dim, true);
}

EmbeddingBlock MockEncoder::embed_trajectory(const TrajectoryRecord& traj) {
  EmbeddingBlock block;
  block.encoder_id = "mock-" + std::to_string(seed_);
  uint64_t h = trajectory_content_hash(traj);
  block.vectors.reserve(params_.block_len);
  for (uint32_t i = 0; i < params_.block_len; ++i) {
    block.vectors.push_back(vector_from(h, 0x626c6b00ULL + i, params_.block_dim, false));
  }
  return block;
}

std::string MockJudge::judge_evolution(const CandidateView& incoming,
                                       const std::vector<CandidateView>& neighbors) {
  for (const CandidateView& n : neighbors) {
    if (n.task_description == incoming.task_description) {
      nlohmann::json out;
      out["action"] = "update";
      out["reasoning"] = "same task template";
      out["target_id"] = n.id;
      out["updated_takeaway"] = "takeaway: " + n.takeaway;
      nlohmann::json tags = nlohmann::json::array();
      for (const AttributeTag& tag : n.tags) tags.push_back(tag.text);
      out["updated_tags"] = std::move(tags);
      return out.dump();
    }
  }
  return R"({"action": "add", "reasoning": "no matching task template"})";
}

std::string MockJudge::judge_refresh(const std::string&, const ImageRef&, const ImageRef&,
                                     const std::string&, const std::vector<TakeawayRef>&) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!refresh_script_.empty()) {
      std::string next = refresh_script_.front();
      refresh_script_.pop_front();
      return next;
    }
  }
  return "Decision: KEEP\nPreserve: NONE\nReason: same phase";
}

std::string MockJudge::digest_guidance(const std::string&, const ImageRef&,
                                       const std::vector<std::string>& summaries) {
  std::string out = "Based on past experience:";
  size_t limit = std::min<size_t>(3, summaries.size());
  for (size_t i = 0; i < limit; ++i) {
    out += " " + summaries[i];
  }
  return out;
}

std::string MockJudge::summarize_strategy(const TrajectoryRecord& traj) {
  std::string first_action = traj.actions.empty() ? "inspect" : traj.actions.front().name;
  return "takeaway: " + first_action + " to handle: " + traj.task_text;
}

std::string MockJudge::extract_tags_raw(const std::string& strategy) {
  // First word of the strategy (the lead action) plus its trailing words.
  std::string out;
  std::string word;
  size_t emitted = 0;
  for (char c : strategy + " ") {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      word.push_back(c);
      continue;
    }
    if (!word.empty() && emitted < 4) {
      if (!out.empty()) out += ", ";
      out += "#" + word;
      ++emitted;
    }
    word.clear();
  }
  return out;
}

void MockJudge::script_refresh(std::vector<std::string> responses) {
  std::lock_guard<std::mutex> lock(mu_);
  for (std::string& r : responses) refresh_script_.push_back(std::move(r));
}

std::string ScriptedJudge::judge_evolution(const CandidateView& incoming,
                                           const std::vector<CandidateView>& neighbors) {
  if (!on_evolution) throw JudgeFailure("no evolution script installed");
  return on_evolution(incoming, neighbors);
}

std::string ScriptedJudge::judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                                         const ImageRef& cur_obs, const std::string& guidance,
                                         const std::vector<TakeawayRef>& takeaways) {
  if (!on_refresh) throw JudgeFailure("no refresh script installed");
  return on_refresh(task_text, prev_obs, cur_obs, guidance, takeaways);
}

std::string ScriptedJudge::digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                                           const std::vector<std::string>& summaries) {
  if (!on_digest) throw JudgeFailure("no digest script installed");
  return on_digest(task_text, cur_obs, summaries);
}

std::string ScriptedJudge::summarize_strategy(const TrajectoryRecord& traj) {
  if (!on_strategy) throw JudgeFailure("no strategy script installed");
  return on_strategy(traj);
}

std::string ScriptedJudge::extract_tags_raw(const std::string& strategy) {
  if (!on_tags) throw JudgeFailure("no tag script installed");
  return on_tags(strategy);
}

}  // namespace hymem
