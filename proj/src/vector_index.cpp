#include "hymem/vector_index.hpp"

#include <algorithm>
#include <mutex>

namespace hymem {

void VectorIndex::check_dims(const SemanticVector& v) const {
  if (v.text_part.size() != text_dim_ || v.image_part.size() != image_dim_) {
    throw DimMismatch("vector dims (" + std::to_string(v.text_part.size()) + ", " +
                      std::to_string(v.image_part.size()) + ") do not match index dims (" +
                      std::to_string(text_dim_) + ", " + std::to_string(image_dim_) + ")");
  }
}

void VectorIndex::upsert(const std::string& node_id, const SemanticVector& v) {
  check_dims(v);
  std::unique_lock lock(mu_);
  entries_[node_id] = v;
}

bool VectorIndex::remove(const std::string& node_id) {
  std::unique_lock lock(mu_);
  return entries_.erase(node_id) > 0;
}

std::vector<std::pair<std::string, double>> VectorIndex::knn(const SemanticVector& query,
                                                             size_t k) const {
  check_dims(query);
  std::shared_lock lock(mu_);

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(entries_.size());
  for (const auto& [id, v] : entries_) {
    scored.emplace_back(id, query.cosine(v));
  }
  size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  scored.resize(take);
  return scored;
}

size_t VectorIndex::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

bool VectorIndex::contains(const std::string& node_id) const {
  std::shared_lock lock(mu_);
  return entries_.count(node_id) > 0;
}

}  // namespace hymem
