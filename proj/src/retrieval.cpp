#include "hymem/retrieval.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace hymem {

namespace {
constexpr size_t kNeighborEnumerationCap = 512;
}

void RetrievalConfig::validate() const {
  if (n_seed == 0) throw ConfigError("n_seed must be at least 1");
  if (n_seed > n_total) throw ConfigError("n_seed must not exceed n_total");
}

std::string to_string(const ItemOrigin& origin) {
  switch (origin.kind) {
    case ItemOrigin::Kind::seed: return "seed";
    case ItemOrigin::Kind::expanded: return "expanded:" + std::to_string(origin.iteration);
    case ItemOrigin::Kind::backfill: return "backfill";
  }
  return "seed";
}

std::vector<std::string> RetrievalResult::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const RetrievedItem& item : items) ids.push_back(item.node_id);
  return ids;
}

RetrievalResult structured_retrieve(const MemoryGraph& graph, const SemanticVector& query,
                                    const RetrievalConfig& cfg) {
  cfg.validate();
  if (graph.empty()) throw EmptyStore("cannot retrieve from an empty store");

  RetrievalResult result;
  std::unordered_set<std::string> selected;
  auto admit = [&](const std::string& id, double score, ItemOrigin origin) {
    result.items.push_back({id, score, origin});
    selected.insert(id);
  };

  // A store smaller than the requested working set is returned whole.
  if (graph.node_count() <= cfg.n_total) {
    for (const auto& [id, score] : graph.knn(query, graph.node_count())) {
      admit(id, score, {ItemOrigin::Kind::seed, 0});
    }
    return result;
  }

  for (const auto& [id, score] : graph.knn(query, cfg.n_seed)) {
    admit(id, score, {ItemOrigin::Kind::seed, 0});
  }

  std::vector<std::string> frontier = result.node_ids();
  for (size_t iter = 1; iter <= cfg.iterations; ++iter) {
    if (result.items.size() >= cfg.n_total || frontier.empty()) break;

    std::set<std::string> candidates;
    for (const std::string& id : frontier) {
      for (const auto& [nbr, weight] : graph.neighbors(id, kNeighborEnumerationCap)) {
        if (!selected.count(nbr)) candidates.insert(nbr);
      }
    }

    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(candidates.size());
    for (const std::string& id : candidates) {
      ranked.emplace_back(id, query.cosine(graph.node(id).semantic));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    size_t cap = cfg.expand_per_seed * frontier.size();
    std::vector<std::string> admitted;
    for (const auto& [id, score] : ranked) {
      if (admitted.size() >= cap || result.items.size() >= cfg.n_total) break;
      admit(id, score, {ItemOrigin::Kind::expanded, iter});
      admitted.push_back(id);
    }
    frontier = std::move(admitted);
  }

  if (result.items.size() < cfg.n_total) {
    for (const auto& [id, score] : graph.knn(query, cfg.n_total * 4)) {
      if (result.items.size() >= cfg.n_total) break;
      if (!selected.count(id)) admit(id, score, {ItemOrigin::Kind::backfill, 0});
    }
  }
  return result;
}

}  // namespace hymem
