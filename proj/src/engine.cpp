#include "hymem/engine.hpp"

namespace hymem {

MemoryEngine::MemoryEngine(std::unique_ptr<MemoryGraph> graph,
                           std::shared_ptr<EncoderProvider> encoder,
                           std::shared_ptr<JudgeProvider> judge, size_t ingest_k,
                           RetrievalConfig retrieval)
    : graph_(std::move(graph)),
      encoder_(std::move(encoder)),
      judge_(std::move(judge)),
      ingest_k_(ingest_k),
      retrieval_(retrieval),
      pipeline_(*graph_, *encoder_, *judge_) {
  retrieval_.validate();
}

MemoryEngine MemoryEngine::create(StoreParams params, std::shared_ptr<EncoderProvider> encoder,
                                  std::shared_ptr<JudgeProvider> judge, size_t ingest_k,
                                  RetrievalConfig retrieval) {
  return MemoryEngine(std::make_unique<MemoryGraph>(params), std::move(encoder),
                      std::move(judge), ingest_k, retrieval);
}

IngestReport MemoryEngine::ingest(const TrajectoryRecord& traj) {
  return pipeline_.ingest(traj, ingest_k_);
}

RetrievalResult MemoryEngine::retrieve(const std::string& task_text, const ImageRef& screenshot,
                                       std::optional<RetrievalConfig> cfg) const {
  SemanticVector query = build_semantic_vector(task_text, screenshot, *encoder_);
  return structured_retrieve(*graph_, query, cfg.value_or(retrieval_));
}

WorkingMemory MemoryEngine::create_working_memory(const std::string& task_text,
                                                  const ImageRef& screenshot,
                                                  std::optional<RetrievalConfig> cfg) {
  WorkingMemory wm = init_working_memory(*graph_, *encoder_, *judge_, task_text, screenshot,
                                         cfg.value_or(retrieval_));
  std::lock_guard<std::mutex> lock(wm_mu_);
  wm.wm_id = "wm-" + std::to_string(++next_wm_);
  sessions_[wm.wm_id] = wm;
  return wm;
}

RefreshOutcome MemoryEngine::refresh_working_memory(const std::string& wm_id,
                                                    const ImageRef& prev_obs,
                                                    const ImageRef& cur_obs) {
  WorkingMemory current;
  {
    std::lock_guard<std::mutex> lock(wm_mu_);
    auto it = sessions_.find(wm_id);
    if (it == sessions_.end()) throw UnknownTarget("working memory " + wm_id + " not found");
    current = it->second;
  }
  RefreshOutcome outcome =
      maybe_refresh(*graph_, *encoder_, *judge_, current, prev_obs, cur_obs, retrieval_);
  if (outcome.refreshed) {
    std::lock_guard<std::mutex> lock(wm_mu_);
    sessions_[wm_id] = outcome.wm;
  }
  return outcome;
}

WorkingMemory MemoryEngine::working_memory(const std::string& wm_id) const {
  std::lock_guard<std::mutex> lock(wm_mu_);
  auto it = sessions_.find(wm_id);
  if (it == sessions_.end()) throw UnknownTarget("working memory " + wm_id + " not found");
  return it->second;
}

}  // namespace hymem
