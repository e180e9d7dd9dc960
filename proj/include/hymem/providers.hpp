#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "hymem/types.hpp"

namespace hymem {

/// Turns raw trajectory content into vectors. Implementations must be
/// deterministic for identical inputs within one instance and safe for
/// concurrent calls.
class EncoderProvider {
 public:
  virtual ~EncoderProvider() = default;

  virtual std::vector<float> embed_text(const std::string& text) = 0;
  virtual std::vector<float> embed_image(const ImageRef& image) = 0;
  virtual EmbeddingBlock embed_trajectory(const TrajectoryRecord& traj) = 0;

  virtual const StoreParams& params() const = 0;
};

/// Model-backed text decisions. Every method returns the model output
/// verbatim; parsing and validation happen in the evolve/wm modules.
class JudgeProvider {
 public:
  virtual ~JudgeProvider() = default;

  virtual std::string judge_evolution(const CandidateView& incoming,
                                      const std::vector<CandidateView>& neighbors) = 0;
  virtual std::string judge_refresh(const std::string& task_text, const ImageRef& prev_obs,
                                    const ImageRef& cur_obs, const std::string& guidance,
                                    const std::vector<TakeawayRef>& takeaways) = 0;
  virtual std::string digest_guidance(const std::string& task_text, const ImageRef& cur_obs,
                                      const std::vector<std::string>& summaries) = 0;
  virtual std::string summarize_strategy(const TrajectoryRecord& traj) = 0;
  virtual std::string extract_tags_raw(const std::string& strategy) = 0;
};

// Builds the matching key for a trajectory: unit-normalized text embedding of
// the task concatenated with the unit-normalized image embedding of the first
// observation.
SemanticVector build_semantic_vector(const std::string& task_text, const ImageRef& first_obs,
                                     EncoderProvider& enc);

// One-paragraph strategy heuristic for the trajectory. Strips a leading
// "takeaway:" marker; throws EmptyStrategy when the judge returns blank.
std::string encode_strategy(const TrajectoryRecord& traj, JudgeProvider& judge);

// Normalized, deduplicated tag set for a strategy. Falls back to the first
// three content words of the strategy when the judge output is unusable;
// throws JudgeFailure only when the fallback is empty too.
std::set<AttributeTag> extract_tags(const std::string& strategy, JudgeProvider& judge);

// Fallback used by extract_tags, exposed for testing.
std::set<AttributeTag> content_word_tags(const std::string& strategy, size_t max_tags = 3);

}  // namespace hymem
