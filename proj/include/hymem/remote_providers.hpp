#pragma once

#include <mutex>
#include <string>
#include <unordered_map>

#include "hymem/prompts.hpp"
#include "hymem/providers.hpp"

namespace hymem {

struct RemoteConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8601"
  int timeout_ms = 30000;
  int max_retries = 3;       // retries after the first attempt
  int backoff_base_ms = 200;  // doubled per retry
};

/// Client for an embedding sidecar speaking
///   POST /embed {"kind":"text"|"image"|"trajectory","payload":...}
///     -> {"vectors":[[f32,...],...]}
/// Responses are cached by request hash, which also makes the provider
/// deterministic for repeated inputs. Throws EncoderFailure after retries.
class RemoteEncoder : public EncoderProvider {
 public:
  RemoteEncoder(RemoteConfig cfg, StoreParams params);

  std::vector<float> embed_text(const std::string& text) override;
  std::vector<float> embed_image(const ImageRef& image) override;
  EmbeddingBlock embed_trajectory(const TrajectoryRecord& traj) override;

  const StoreParams& params() const override { return params_; }

 private:
  std::vector<std::vector<float>> request_vectors(const std::string& kind,
                                                  const std::string& payload_json,
                                                  size_t expect_count, size_t expect_dim);

  RemoteConfig cfg_;
  StoreParams params_;
  std::mutex cache_mu_;
  std::unordered_map<uint64_t, std::string> cache_;
};

/// Client for a completion sidecar speaking
///   POST /complete {"prompt": string, "images":[uri,...]} -> {"text": string}
/// Renders the wire-contract prompts, caches responses by prompt hash, and
/// throws JudgeFailure after retries.
class RemoteJudge : public JudgeProvider {
 public:
  explicit RemoteJudge(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

  std::string judge_evolution(const CandidateView& incoming,
                              const std::vector<CandidateView>& neighbors) override;
  std::string judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                            const ImageRef& cur_obs, const std::string& guidance,
                            const std::vector<TakeawayRef>& takeaways) override;
  std::string digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                              const std::vector<std::string>& summaries) override;
  std::string summarize_strategy(const TrajectoryRecord& traj) override;
  std::string extract_tags_raw(const std::string& strategy) override;

 private:
  std::string complete(const RenderedPrompt& prompt);

  RemoteConfig cfg_;
  std::mutex cache_mu_;
  std::unordered_map<uint64_t, std::string> cache_;
};

}  // namespace hymem
