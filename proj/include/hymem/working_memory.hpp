#pragma once

#include <set>
#include <string>
#include <vector>

#include "hymem/memory_graph.hpp"
#include "hymem/providers.hpp"
#include "hymem/retrieval.hpp"

namespace hymem {

struct RefreshOutcome {
  bool refreshed = false;
  WorkingMemory wm;  // refreshed working memory, or the input unchanged
  RefreshDecision decision;
  bool malformed_judge_output = false;  // judge text unusable, kept conservatively
};

/// Parses the strict line-oriented refresh verdict ("Decision: ...",
/// "Preserve: ...", "Reason: ..."). Keys are case-insensitive, whitespace is
/// tolerated, "Preserve: NONE" means the empty set, and unknown preserve ids
/// are dropped (recorded, not raised). Throws MalformedRefresh only when the
/// Decision line is absent or names neither verdict.
RefreshDecision parse_refresh_decision(const std::string& raw,
                                       const std::set<std::string>& valid_ids);

/// Builds the initial working memory for a task: retrieves a working set,
/// digests it into guidance, and attaches the retrieved embedding blocks in
/// result order. On digestion failure the guidance falls back to a
/// deterministic concatenation of the top three strategies (flagged).
WorkingMemory init_working_memory(const MemoryGraph& graph, EncoderProvider& encoder,
                                  JudgeProvider& judge, const std::string& task_text,
                                  const ImageRef& cur_obs, const RetrievalConfig& cfg);

/// Runs the phase-shift check on an observation transition. KEEP returns the
/// input unchanged; UPDATE retains the preserved takeaways, re-retrieves
/// conditioned on the current observation, re-digests the guidance, and
/// bumps the phase. Malformed judge output defaults to KEEP.
RefreshOutcome maybe_refresh(const MemoryGraph& graph, EncoderProvider& encoder,
                             JudgeProvider& judge, const WorkingMemory& wm,
                             const ImageRef& prev_obs, const ImageRef& cur_obs,
                             const RetrievalConfig& cfg);

// "{strategy} (tags: #a, #b)" line used for digestion input.
std::string node_summary(const MemoryNode& node);

}  // namespace hymem
