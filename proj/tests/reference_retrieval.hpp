#pragma once

// Reference implementation of seed-and-expand retrieval, written against the
// documented rules only. It reads the graph exclusively through the node
// table (never through neighbors()/knn()/structured_retrieve()) so it can
// serve as an independent oracle.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hymem/memory_graph.hpp"
#include "hymem/retrieval.hpp"

namespace hymem::reference {

struct RefItem {
  std::string id;
  double score;
  std::string origin;  // "seed", "expanded:<iter>", "backfill"
};

inline double ref_cosine(const SemanticVector& a, const SemanticVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.text_part.size(); ++i) {
    dot += double(a.text_part[i]) * double(b.text_part[i]);
    na += double(a.text_part[i]) * double(a.text_part[i]);
    nb += double(b.text_part[i]) * double(b.text_part[i]);
  }
  for (size_t i = 0; i < a.image_part.size(); ++i) {
    dot += double(a.image_part[i]) * double(b.image_part[i]);
    na += double(a.image_part[i]) * double(a.image_part[i]);
    nb += double(b.image_part[i]) * double(b.image_part[i]);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline bool ref_share_tag(const MemoryNode& a, const MemoryNode& b) {
  for (const AttributeTag& t : a.attributes) {
    if (b.attributes.count(t)) return true;
  }
  return false;
}

// Rank node ids by cosine to the query, descending; ties by ascending id.
inline std::vector<std::pair<std::string, double>> ref_rank(
    const MemoryGraph& graph, const SemanticVector& query,
    const std::vector<std::string>& ids) {
  std::vector<std::pair<std::string, double>> ranked;
  for (const std::string& id : ids) {
    ranked.emplace_back(id, ref_cosine(query, graph.nodes().at(id).semantic));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return ranked;
}

inline std::vector<RefItem> reference_retrieve(const MemoryGraph& graph,
                                               const SemanticVector& query,
                                               const RetrievalConfig& cfg) {
  std::vector<std::string> everyone;
  for (const auto& [id, node] : graph.nodes()) everyone.push_back(id);

  std::vector<RefItem> out;
  std::set<std::string> taken;

  // Whole store fits: return it all, ranked, as seeds.
  if (everyone.size() <= cfg.n_total) {
    for (const auto& [id, score] : ref_rank(graph, query, everyone)) {
      out.push_back({id, score, "seed"});
    }
    return out;
  }

  auto ranked_all = ref_rank(graph, query, everyone);
  for (size_t i = 0; i < cfg.n_seed; ++i) {
    out.push_back({ranked_all[i].first, ranked_all[i].second, "seed"});
    taken.insert(ranked_all[i].first);
  }

  std::vector<std::string> frontier;
  for (const RefItem& item : out) frontier.push_back(item.id);

  for (size_t iter = 1; iter <= cfg.iterations; ++iter) {
    if (out.size() >= cfg.n_total || frontier.empty()) break;

    std::vector<std::string> hop;
    for (const std::string& fid : frontier) {
      const MemoryNode& f = graph.nodes().at(fid);
      for (const auto& [oid, other] : graph.nodes()) {
        if (oid == fid || taken.count(oid)) continue;
        if (!ref_share_tag(f, other)) continue;
        if (std::find(hop.begin(), hop.end(), oid) == hop.end()) hop.push_back(oid);
      }
    }

    size_t budget = cfg.expand_per_seed * frontier.size();
    std::vector<std::string> admitted;
    for (const auto& [id, score] : ref_rank(graph, query, hop)) {
      if (admitted.size() >= budget || out.size() >= cfg.n_total) break;
      out.push_back({id, score, "expanded:" + std::to_string(iter)});
      taken.insert(id);
      admitted.push_back(id);
    }
    frontier = admitted;
  }

  for (const auto& [id, score] : ranked_all) {
    if (out.size() >= cfg.n_total) break;
    if (!taken.count(id)) {
      out.push_back({id, score, "backfill"});
      taken.insert(id);
    }
  }
  return out;
}

}  // namespace hymem::reference
