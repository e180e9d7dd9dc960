#pragma once

#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hymem/memory_graph.hpp"
#include "hymem/providers.hpp"

namespace hymem {

/// Outcome of ingesting one trajectory.
struct IngestReport {
  EvolutionDecision decision;
  std::string node_id;  // added node, merge target, or replacement node
  std::vector<std::pair<std::string, double>> neighbors_considered;
  bool forced_add = false;     // empty store or K = 0, judge skipped
  bool fallback_used = false;  // judge output was malformed, ADD applied
  std::string parse_error;     // set when fallback_used
};

/// Parses the judge's JSON verdict. Accepts a bare JSON object, tolerates
/// surrounding ``` fences, and maps the wire action "update" to merge.
/// target_id / old_id must name members of candidate_ids. Throws
/// MalformedDecision naming the offending field.
EvolutionDecision parse_evolution_decision(const std::string& raw,
                                           const std::set<std::string>& candidate_ids);

// Judge-facing view of a stored node (similarity comes from the kNN that
// retrieved it).
CandidateView build_candidate_view(const MemoryNode& node, std::optional<double> similarity);

// Judge-facing view of an incoming trajectory whose strategy and tags have
// already been encoded.
CandidateView build_candidate_view(const TrajectoryRecord& traj, const std::string& strategy,
                                   const std::set<AttributeTag>& tags);

/// Per-trajectory self-evolution: retrieve comparison neighbors, run the
/// redundancy judge, apply the structured update. Ingest calls are
/// serialized; a malformed verdict falls back to ADD (information-
/// preserving) and is recorded in the report rather than raised.
class EvolutionPipeline {
 public:
  static constexpr size_t kDefaultNeighbors = 5;

  EvolutionPipeline(MemoryGraph& graph, EncoderProvider& encoder, JudgeProvider& judge)
      : graph_(graph), encoder_(encoder), judge_(judge) {}

  IngestReport ingest(const TrajectoryRecord& traj, size_t k = kDefaultNeighbors);

 private:
  MemoryGraph& graph_;
  EncoderProvider& encoder_;
  JudgeProvider& judge_;
  std::mutex ingest_mu_;
};

}  // namespace hymem
