#include "hymem/memory_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <mutex>
#include <unordered_map>

namespace hymem {

MemoryGraph::MemoryGraph(StoreParams params)
    : params_(params), index_(params.text_dim, params.image_dim) {
  params_.validate();
}

std::string MemoryGraph::mint_node_id() {
  std::unique_lock lock(mu_);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "n%06llu",
                static_cast<unsigned long long>(++next_node_seq_));
  return buf;
}

void MemoryGraph::index_tags(const MemoryNode& node) {
  for (const AttributeTag& tag : node.attributes) {
    tag_index_[tag].insert(node.node_id);
  }
}

void MemoryGraph::unindex_tags(const MemoryNode& node) {
  for (const AttributeTag& tag : node.attributes) {
    auto it = tag_index_.find(tag);
    if (it == tag_index_.end()) continue;
    it->second.erase(node.node_id);
    if (it->second.empty()) tag_index_.erase(it);
  }
}

void MemoryGraph::check_new_lineage(const std::vector<std::string>& traj_ids) const {
  for (const std::string& id : traj_ids) {
    if (lineage_.count(id)) {
      throw DuplicateId("trajectory " + id + " is already recorded in the store");
    }
  }
}

std::string MemoryGraph::apply_add(MemoryNode node) {
  node.validate(params_);
  std::unique_lock lock(mu_);
  if (nodes_.count(node.node_id)) {
    throw DuplicateId("node " + node.node_id + " already exists");
  }
  check_new_lineage(node.source_trajectory_ids);

  ++version_;
  node.created_at = static_cast<int64_t>(version_);
  node.updated_at = static_cast<int64_t>(version_);
  for (const std::string& sid : node.source_trajectory_ids) lineage_.insert(sid);
  index_.upsert(node.node_id, node.semantic);
  index_tags(node);
  std::string id = node.node_id;
  nodes_.emplace(id, std::move(node));
  return id;
}

void MemoryGraph::apply_merge(const std::string& target_id, const std::string& updated_takeaway,
                              const std::vector<AttributeTag>& updated_tags,
                              const std::string& new_traj_id, EmbeddingBlock new_embedding) {
  if (trim(updated_takeaway).empty()) {
    throw EmptyTakeaway("merge into " + target_id + " carries an empty takeaway");
  }
  std::set<AttributeTag> tags(updated_tags.begin(), updated_tags.end());
  if (tags.empty()) {
    throw EmptyTag("merge into " + target_id + " carries no tags");
  }
  new_embedding.validate(params_.block_dim, params_.block_len);

  std::unique_lock lock(mu_);
  auto it = nodes_.find(target_id);
  if (it == nodes_.end()) throw UnknownTarget("merge target " + target_id + " not found");
  check_new_lineage({new_traj_id});

  ++version_;
  MemoryNode& node = it->second;
  unindex_tags(node);
  node.strategy = updated_takeaway;
  node.attributes = std::move(tags);
  node.embedding = std::move(new_embedding);
  node.merge_count += 1;
  node.source_trajectory_ids.push_back(new_traj_id);
  node.updated_at = static_cast<int64_t>(version_);
  lineage_.insert(new_traj_id);
  index_tags(node);
  ++merge_total_;
}

std::string MemoryGraph::apply_replace(const std::string& old_id, MemoryNode new_node) {
  new_node.replaced_from = old_id;
  new_node.validate(params_);

  std::unique_lock lock(mu_);
  auto it = nodes_.find(old_id);
  if (it == nodes_.end()) throw UnknownTarget("replace target " + old_id + " not found");
  if (nodes_.count(new_node.node_id)) {
    throw DuplicateId("node " + new_node.node_id + " already exists");
  }
  // The old node's lineage is about to be released, so only trajectories
  // recorded elsewhere count as duplicates.
  const auto& released = it->second.source_trajectory_ids;
  for (const std::string& sid : new_node.source_trajectory_ids) {
    bool in_released = std::find(released.begin(), released.end(), sid) != released.end();
    if (!in_released && lineage_.count(sid)) {
      throw DuplicateId("trajectory " + sid + " is already recorded in the store");
    }
  }
  for (const std::string& sid : released) lineage_.erase(sid);

  ++version_;
  unindex_tags(it->second);
  index_.remove(old_id);
  nodes_.erase(it);

  new_node.created_at = static_cast<int64_t>(version_);
  new_node.updated_at = static_cast<int64_t>(version_);
  for (const std::string& sid : new_node.source_trajectory_ids) lineage_.insert(sid);
  index_.upsert(new_node.node_id, new_node.semantic);
  index_tags(new_node);
  std::string id = new_node.node_id;
  nodes_.emplace(id, std::move(new_node));
  ++replace_total_;
  return id;
}

std::vector<std::pair<std::string, size_t>> MemoryGraph::neighbors(
    const std::string& node_id, std::optional<size_t> limit) const {
  std::shared_lock lock(mu_);
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw UnknownTarget("node " + node_id + " not found");

  std::unordered_map<std::string, size_t> weight;
  for (const AttributeTag& tag : it->second.attributes) {
    auto bucket = tag_index_.find(tag);
    if (bucket == tag_index_.end()) continue;
    for (const std::string& other : bucket->second) {
      if (other != node_id) ++weight[other];
    }
  }

  std::vector<std::pair<std::string, size_t>> out(weight.begin(), weight.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (limit && out.size() > *limit) out.resize(*limit);
  return out;
}

GraphStats MemoryGraph::stats() const {
  std::shared_lock lock(mu_);
  GraphStats s;
  s.node_count = nodes_.size();
  s.distinct_tag_count = tag_index_.size();
  s.merge_total = merge_total_;
  s.replace_total = replace_total_;

  // Count unordered adjacent pairs without materializing them: for each node
  // u, stamp every co-member with a larger index exactly once.
  std::unordered_map<std::string, uint32_t> order;
  order.reserve(nodes_.size());
  uint32_t next = 0;
  for (const auto& [id, node] : nodes_) order.emplace(id, next++);

  std::vector<uint32_t> stamp(nodes_.size(), UINT32_MAX);
  uint32_t iu = 0;
  for (const auto& [id, node] : nodes_) {
    for (const AttributeTag& tag : node.attributes) {
      auto bucket = tag_index_.find(tag);
      if (bucket == tag_index_.end()) continue;
      for (const std::string& other : bucket->second) {
        uint32_t iw = order[other];
        if (iw > iu && stamp[iw] != iu) {
          stamp[iw] = iu;
          ++s.derived_edge_count;
        }
      }
    }
    ++iu;
  }
  return s;
}

bool MemoryGraph::contains_node(const std::string& node_id) const {
  std::shared_lock lock(mu_);
  return nodes_.count(node_id) > 0;
}

const MemoryNode& MemoryGraph::node(const std::string& node_id) const {
  std::shared_lock lock(mu_);
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw UnknownTarget("node " + node_id + " not found");
  return it->second;
}

size_t MemoryGraph::node_count() const {
  std::shared_lock lock(mu_);
  return nodes_.size();
}

bool MemoryGraph::has_trajectory(const std::string& traj_id) const {
  std::shared_lock lock(mu_);
  return lineage_.count(traj_id) > 0;
}

std::vector<std::pair<std::string, double>> MemoryGraph::knn(const SemanticVector& query,
                                                             size_t k) const {
  return index_.knn(query, k);
}

uint64_t MemoryGraph::version() const {
  std::shared_lock lock(mu_);
  return version_;
}

std::map<AttributeTag, std::set<std::string>> MemoryGraph::rebuild_tag_index() const {
  std::shared_lock lock(mu_);
  std::map<AttributeTag, std::set<std::string>> rebuilt;
  for (const auto& [id, node] : nodes_) {
    for (const AttributeTag& tag : node.attributes) rebuilt[tag].insert(id);
  }
  return rebuilt;
}

std::vector<std::string> MemoryGraph::integrity_errors() const {
  std::vector<std::string> errors;
  auto rebuilt = rebuild_tag_index();
  std::shared_lock lock(mu_);
  if (rebuilt != tag_index_) errors.push_back("tag index does not match node attributes");
  if (index_.size() != nodes_.size()) {
    errors.push_back("vector index size " + std::to_string(index_.size()) +
                     " != node count " + std::to_string(nodes_.size()));
  }
  std::unordered_set<std::string> lineage;
  for (const auto& [id, node] : nodes_) {
    if (!index_.contains(id)) errors.push_back("node " + id + " missing from vector index");
    try {
      node.validate(params_);
    } catch (const Error& e) {
      errors.push_back("node " + id + ": " + e.what());
    }
    for (const std::string& sid : node.source_trajectory_ids) {
      if (!lineage.insert(sid).second) {
        errors.push_back("trajectory " + sid + " appears in multiple nodes");
      }
    }
  }
  if (lineage != lineage_) errors.push_back("lineage set does not match node sources");
  return errors;
}

bool graphs_equal(const MemoryGraph& a, const MemoryGraph& b) {
  return a.params() == b.params() && a.version() == b.version() &&
         a.nodes() == b.nodes() && a.tag_index() == b.tag_index() &&
         a.stats() == b.stats();
}

}  // namespace hymem
