#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "hymem/types.hpp"
#include "hymem/vector_index.hpp"

namespace hymem {

struct GraphStats {
  uint64_t node_count = 0;
  uint64_t distinct_tag_count = 0;
  uint64_t derived_edge_count = 0;  // unordered pairs sharing >= 1 tag
  uint64_t merge_total = 0;
  uint64_t replace_total = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// The memory graph store. Nodes are the only materialized entities; the
/// edge relation is derived on demand from the tag inverted index: two
/// distinct nodes are adjacent iff they share at least one normalized tag,
/// with the shared-tag count as edge weight. Single writer, multiple
/// readers; every mutation is atomic with respect to readers.
///
/// Timestamps are the store's own mutation clock (the version counter at the
/// time of the op), which keeps whole-store runs byte-reproducible.
class MemoryGraph {
 public:
  explicit MemoryGraph(StoreParams params);

  MemoryGraph(const MemoryGraph&) = delete;
  MemoryGraph& operator=(const MemoryGraph&) = delete;

  const StoreParams& params() const { return params_; }

  /// Fresh store-unique node id ("n000001", ...). The counter never reuses
  /// ids, including across REPLACE, and persists in snapshots.
  std::string mint_node_id();

  /// Inserts a new node; updates the tag index and the vector index.
  /// Returns the node id. Throws DuplicateId.
  std::string apply_add(MemoryNode node);

  /// Rewrites the target's strategy, replaces its tag set (the judge
  /// supplies the complete updated list), swaps in the new embedding block,
  /// increments merge_count, and appends the new source trajectory. Node
  /// count is unchanged. Throws UnknownTarget / EmptyTakeaway / EmptyTag.
  void apply_merge(const std::string& target_id, const std::string& updated_takeaway,
                   const std::vector<AttributeTag>& updated_tags, const std::string& new_traj_id,
                   EmbeddingBlock new_embedding);

  /// Removes old_id everywhere and inserts new_node with replaced_from set
  /// to old_id. Net node count unchanged. Returns the new node id.
  std::string apply_replace(const std::string& old_id, MemoryNode new_node);

  /// Distinct nodes sharing >= 1 tag with node_id, weight = shared-tag
  /// count, sorted by weight descending then node id ascending.
  std::vector<std::pair<std::string, size_t>> neighbors(
      const std::string& node_id, std::optional<size_t> limit = std::nullopt) const;

  GraphStats stats() const;

  bool contains_node(const std::string& node_id) const;
  const MemoryNode& node(const std::string& node_id) const;  // throws UnknownTarget
  size_t node_count() const;
  bool empty() const { return node_count() == 0; }

  // True iff the trajectory id appears in any live node's lineage.
  bool has_trajectory(const std::string& traj_id) const;

  std::vector<std::pair<std::string, double>> knn(const SemanticVector& query, size_t k) const;
  const VectorIndex& index() const { return index_; }

  uint64_t version() const;

  // Snapshot round trip is bit-exact: floats are stored as raw 32-bit
  // little-endian words, and the file carries a checksum verified on load.
  // Writes go to a temp file renamed into place.
  void save_snapshot(const std::filesystem::path& path) const;
  static std::unique_ptr<MemoryGraph> load_snapshot(const std::filesystem::path& path);

  // Inspection / verification surface.
  const std::map<std::string, MemoryNode>& nodes() const { return nodes_; }
  const std::map<AttributeTag, std::set<std::string>>& tag_index() const { return tag_index_; }
  std::map<AttributeTag, std::set<std::string>> rebuild_tag_index() const;
  std::vector<std::string> integrity_errors() const;

 private:
  void index_tags(const MemoryNode& node);
  void unindex_tags(const MemoryNode& node);
  void check_new_lineage(const std::vector<std::string>& traj_ids) const;

  StoreParams params_;
  std::map<std::string, MemoryNode> nodes_;
  std::map<AttributeTag, std::set<std::string>> tag_index_;
  std::unordered_set<std::string> lineage_;  // live source trajectory ids
  VectorIndex index_;
  uint64_t version_ = 0;
  uint64_t next_node_seq_ = 0;
  uint64_t merge_total_ = 0;
  uint64_t replace_total_ = 0;
  mutable std::shared_mutex mu_;
};

// Field-for-field equality including float bit patterns; used by snapshot
// tests and the HTTP/library equivalence checks.
bool graphs_equal(const MemoryGraph& a, const MemoryGraph& b);

}  // namespace hymem
