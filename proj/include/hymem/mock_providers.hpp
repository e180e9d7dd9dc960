#pragma once

#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "hymem/providers.hpp"

namespace hymem {

/// Offline encoder: seeded-hash counter-mode vectors, unit-normalized. Pure —
/// the same seed and input bytes produce the same output across process runs.
class MockEncoder : public EncoderProvider {
 public:
  explicit MockEncoder(uint64_t seed, StoreParams params = {});

  std::vector<float> embed_text(const std::string& text) override;
  std::vector<float> embed_image(const ImageRef& image) override;
  EmbeddingBlock embed_trajectory(const TrajectoryRecord& traj) override;

  const StoreParams& params() const override { return params_; }

 private:
  std::vector<float> vector_from(uint64_t content_hash, uint64_t stream, uint32_t dim,
                                 bool normalize) const;

  uint64_t seed_;
  StoreParams params_;
};

/// Offline judge with deterministic, content-derived behavior:
///   - evolution: merge into the first neighbor whose task matches the
///     incoming trajectory's task exactly, otherwise add (duplicate-template
///     compression);
///   - refresh: always KEEP;
///   - digestion: deterministic synthesis of the top summaries;
///   - strategy: derived from the first action and the task text;
///   - tags: action names plus the domain tag.
/// Individual behaviors can be overridden with the script hooks below.
class MockJudge : public JudgeProvider {
 public:
  MockJudge() = default;

  std::string judge_evolution(const CandidateView& incoming,
                              const std::vector<CandidateView>& neighbors) override;
  std::string judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                            const ImageRef& cur_obs, const std::string& guidance,
                            const std::vector<TakeawayRef>& takeaways) override;
  std::string digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                              const std::vector<std::string>& summaries) override;
  std::string summarize_strategy(const TrajectoryRecord& traj) override;
  std::string extract_tags_raw(const std::string& strategy) override;

  /// Queue raw refresh responses; consumed in order, then falls back to KEEP.
  void script_refresh(std::vector<std::string> responses);

 private:
  std::mutex mu_;
  std::deque<std::string> refresh_script_;
};

/// Fully scripted judge for tests: each hook is a std::function; unset hooks
/// throw JudgeFailure.
class ScriptedJudge : public JudgeProvider {
 public:
  std::function<std::string(const CandidateView&, const std::vector<CandidateView>&)>
      on_evolution;
  std::function<std::string(const std::string&, const ImageRef&, const ImageRef&,
                            const std::string&, const std::vector<TakeawayRef>&)>
      on_refresh;
  std::function<std::string(const std::string&, const ImageRef&,
                            const std::vector<std::string>&)>
      on_digest;
  std::function<std::string(const TrajectoryRecord&)> on_strategy;
  std::function<std::string(const std::string&)> on_tags;

  std::string judge_evolution(const CandidateView& incoming,
                              const std::vector<CandidateView>& neighbors) override;
  std::string judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                            const ImageRef& cur_obs, const std::string& guidance,
                            const std::vector<TakeawayRef>& takeaways) override;
  std::string digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                              const std::vector<std::string>& summaries) override;
  std::string summarize_strategy(const TrajectoryRecord& traj) override;
  std::string extract_tags_raw(const std::string& strategy) override;
};

// Digest of an ImageRef suitable for deterministic hashing.
uint64_t image_ref_hash(const ImageRef& image);

// Content hash of a trajectory (id excluded, so identical content from
// different recordings hashes the same).
uint64_t trajectory_content_hash(const TrajectoryRecord& traj);

}  // namespace hymem
