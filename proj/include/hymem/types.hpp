#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hymem/errors.hpp"

namespace hymem {

// Store-wide dimensional constants, fixed when a store is created and
// persisted in its snapshot header.
struct StoreParams {
  uint32_t text_dim = 512;    // text half of the semantic vector
  uint32_t image_dim = 512;   // image half of the semantic vector
  uint32_t block_dim = 3584;  // per-vector width of a trajectory embedding block
  uint32_t block_len = 8;     // vectors per trajectory embedding block

  void validate() const;
  friend bool operator==(const StoreParams&, const StoreParams&) = default;
};

enum class TrajectorySource { human_demo, agent_rollout, external_dataset };

std::string_view to_string(TrajectorySource source);
TrajectorySource trajectory_source_from_string(std::string_view s);

// Reference to a screenshot. Opaque to the engine: only the uri and the
// content digest are used, never the pixels.
struct ImageRef {
  std::string uri;
  std::array<uint8_t, 32> content_hash{};

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct ActionStep {
  std::string name;
  std::string argument;

  friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

// One recorded agent episode: instruction, screenshot sequence, action
// sequence, provenance.
struct TrajectoryRecord {
  std::string id;
  std::string task_text;
  std::vector<ImageRef> observations;  // first entry is required
  std::vector<ActionStep> actions;
  std::string domain_tag;  // empty means unknown
  TrajectorySource source = TrajectorySource::agent_rollout;

  // Throws InvalidTrajectory when the record cannot be ingested.
  void validate() const;
};

// Normalized symbolic label. Construct through normalize_tag; equality is
// exact string equality of the normalized text.
struct AttributeTag {
  std::string text;

  auto operator<=>(const AttributeTag&) const = default;
};

// Canonical tag form: lowercase, internal whitespace runs collapsed to a
// single hyphen, exactly one leading '#' or '$' sigil ('#' when absent).
// Idempotent. Throws EmptyTag when nothing remains after normalization.
AttributeTag normalize_tag(std::string_view raw);

// Renders a tag list as "#a, #b, #c".
std::string format_tags(const std::set<AttributeTag>& tags);
std::string format_tags(const std::vector<AttributeTag>& tags);

// Unit-normalized text/image pair; the logical value is the concatenation.
struct SemanticVector {
  std::vector<float> text_part;
  std::vector<float> image_part;

  size_t dim() const { return text_part.size() + image_part.size(); }

  // Cosine similarity over the concatenated value. Accumulates in double.
  double cosine(const SemanticVector& other) const;

  // Both halves must have Euclidean norm 1 within `tol`.
  void validate(uint32_t text_dim, uint32_t image_dim, double tol = 1e-6) const;

  friend bool operator==(const SemanticVector&, const SemanticVector&) = default;
};

// Fixed-count continuous condensation of a full trajectory.
struct EmbeddingBlock {
  std::vector<std::vector<float>> vectors;
  std::string encoder_id;

  void validate(uint32_t block_dim, uint32_t block_len) const;

  friend bool operator==(const EmbeddingBlock&, const EmbeddingBlock&) = default;
};

// Stored memory unit: one strategy plus its tags, trajectory embedding,
// semantic vector, and lineage bookkeeping. task_text / domain_tag /
// first_screenshot carry the founding trajectory's context so the node can
// be presented back to a judge.
struct MemoryNode {
  std::string node_id;
  std::string strategy;
  std::string task_text;
  std::string domain_tag;
  ImageRef first_screenshot;
  std::set<AttributeTag> attributes;
  EmbeddingBlock embedding;
  SemanticVector semantic;
  uint64_t merge_count = 0;
  std::string replaced_from;  // empty means none
  std::vector<std::string> source_trajectory_ids;
  int64_t created_at = 0;  // store mutation clock, not wall time
  int64_t updated_at = 0;

  void validate(const StoreParams& params) const;

  friend bool operator==(const MemoryNode&, const MemoryNode&) = default;
};

// Judge verdict for one incoming trajectory.
struct EvolutionDecision {
  enum class Action { add, merge, replace };

  Action action = Action::add;
  std::string reasoning;
  std::string target_id;                   // merge only
  std::string updated_takeaway;            // merge only
  std::vector<AttributeTag> updated_tags;  // merge only
  std::string old_id;                      // replace only

  static EvolutionDecision make_add(std::string reasoning);
  static EvolutionDecision make_merge(std::string reasoning, std::string target_id,
                                      std::string updated_takeaway,
                                      std::vector<AttributeTag> updated_tags);
  static EvolutionDecision make_replace(std::string reasoning, std::string old_id);

  // Enforces the conditional-field rules; throws MalformedDecision.
  void validate() const;
};

std::string_view to_string(EvolutionDecision::Action action);

// What the evolution judge sees for one trajectory or stored node.
struct CandidateView {
  std::string id;
  std::string task_description;
  std::string takeaway;
  std::vector<AttributeTag> tags;
  std::string domain;
  std::string screenshot_uri;
  std::optional<double> similarity;  // present for retrieved neighbors only
};

struct TakeawayRef {
  std::string id;  // node id the takeaway came from
  std::string text;

  friend bool operator==(const TakeawayRef&, const TakeawayRef&) = default;
};

enum class RefreshVerdict { keep, update };

// Parsed outcome of the working-memory relevance check.
struct RefreshDecision {
  RefreshVerdict verdict = RefreshVerdict::keep;
  std::set<std::string> preserve_ids;
  std::string reason;
  std::vector<std::string> dropped_ids;  // unknown ids dropped during parsing
};

// Live inference context for one agent session.
struct WorkingMemory {
  std::string wm_id;
  std::string task_text;
  std::string guidance;
  bool guidance_fallback = false;  // digestion failed, deterministic fallback used
  std::vector<std::string> attached_nodes;
  std::vector<TakeawayRef> takeaways;
  std::vector<EmbeddingBlock> embedding_blocks;  // aligned with attached_nodes
  uint64_t phase = 0;
};

// Strips one leading "takeaway:" marker (case-insensitive) plus surrounding
// whitespace.
std::string strip_takeaway_prefix(std::string_view text);

std::string trim(std::string_view s);

}  // namespace hymem
