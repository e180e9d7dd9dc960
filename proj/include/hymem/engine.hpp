#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "hymem/evolution.hpp"
#include "hymem/memory_graph.hpp"
#include "hymem/providers.hpp"
#include "hymem/retrieval.hpp"
#include "hymem/working_memory.hpp"

namespace hymem {

/// One store plus its providers and the live working-memory sessions. This is
/// the surface the CLI and the HTTP service both drive, so their behavior
/// stays identical to the library's by construction.
class MemoryEngine {
 public:
  MemoryEngine(std::unique_ptr<MemoryGraph> graph, std::shared_ptr<EncoderProvider> encoder,
               std::shared_ptr<JudgeProvider> judge, size_t ingest_k = 5,
               RetrievalConfig retrieval = {});

  static MemoryEngine create(StoreParams params, std::shared_ptr<EncoderProvider> encoder,
                             std::shared_ptr<JudgeProvider> judge, size_t ingest_k = 5,
                             RetrievalConfig retrieval = {});

  IngestReport ingest(const TrajectoryRecord& traj);

  RetrievalResult retrieve(const std::string& task_text, const ImageRef& screenshot,
                           std::optional<RetrievalConfig> cfg = std::nullopt) const;

  // Creates a session-scoped working memory and registers it under a fresh
  // wm id ("wm-1", "wm-2", ...).
  WorkingMemory create_working_memory(const std::string& task_text, const ImageRef& screenshot,
                                      std::optional<RetrievalConfig> cfg = std::nullopt);

  // Throws UnknownTarget for an unknown wm id. On UPDATE the stored session
  // is replaced by the refreshed working memory.
  RefreshOutcome refresh_working_memory(const std::string& wm_id, const ImageRef& prev_obs,
                                        const ImageRef& cur_obs);

  WorkingMemory working_memory(const std::string& wm_id) const;

  GraphStats stats() const { return graph_->stats(); }
  MemoryGraph& graph() { return *graph_; }
  const MemoryGraph& graph() const { return *graph_; }
  const RetrievalConfig& default_retrieval() const { return retrieval_; }
  size_t ingest_k() const { return ingest_k_; }

  void save(const std::filesystem::path& path) const { graph_->save_snapshot(path); }

 private:
  std::unique_ptr<MemoryGraph> graph_;
  std::shared_ptr<EncoderProvider> encoder_;
  std::shared_ptr<JudgeProvider> judge_;
  size_t ingest_k_;
  RetrievalConfig retrieval_;
  EvolutionPipeline pipeline_;

  mutable std::mutex wm_mu_;
  std::unordered_map<std::string, WorkingMemory> sessions_;
  uint64_t next_wm_ = 0;
};

}  // namespace hymem
