#pragma once

#include <string>
#include <vector>

#include "hymem/memory_graph.hpp"

namespace hymem {

struct RetrievalConfig {
  size_t n_total = 10;         // working-set size handed to the agent
  size_t n_seed = 5;           // kNN seeds
  size_t expand_per_seed = 5;  // per-frontier-node admission cap per hop
  size_t iterations = 1;       // expand-and-rerank hops

  void validate() const;  // throws ConfigError
};

struct ItemOrigin {
  enum class Kind { seed, expanded, backfill };
  Kind kind = Kind::seed;
  size_t iteration = 0;  // meaningful for expanded items only

  friend bool operator==(const ItemOrigin&, const ItemOrigin&) = default;
};

std::string to_string(const ItemOrigin& origin);

struct RetrievedItem {
  std::string node_id;
  double score = 0.0;  // cosine to the query
  ItemOrigin origin;

  friend bool operator==(const RetrievedItem&, const RetrievedItem&) = default;
};

/// Ranked, de-duplicated working set: seeds first, then expansion bands in
/// iteration order, then any backfill; each band is sorted by score
/// descending with ties broken by node id.
struct RetrievalResult {
  std::vector<RetrievedItem> items;

  std::vector<std::string> node_ids() const;
};

/// Seed-and-expand retrieval:
///   1. seed with knn(query, n_seed);
///   2. for each of `iterations` hops, gather the frontier's 1-hop
///      neighbors, re-rank them by cosine to the query, and admit up to
///      expand_per_seed x |frontier| of them (never past n_total); the
///      admitted nodes become the next frontier;
///   3. backfill from plain knn if the expansion under-fills;
///   4. a store smaller than n_total is returned whole, as seeds.
/// Neighbor enumeration per frontier node is capped at 512, highest edge
/// weight first; ranking itself ignores edge weight.
RetrievalResult structured_retrieve(const MemoryGraph& graph, const SemanticVector& query,
                                    const RetrievalConfig& cfg);

}  // namespace hymem
