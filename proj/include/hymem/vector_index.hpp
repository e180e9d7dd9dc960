#pragma once

#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hymem/types.hpp"

namespace hymem {

/// Exact cosine nearest-neighbor index over node semantic vectors. Linear
/// scan: store sizes stay in the low thousands, so exact search is fast and
/// trivially testable. Readers and the single writer follow a shared_mutex
/// contract; knn never observes a partially applied upsert.
class VectorIndex {
 public:
  VectorIndex(uint32_t text_dim, uint32_t image_dim)
      : text_dim_(text_dim), image_dim_(image_dim) {}

  // Inserts or overwrites the vector for node_id. Throws DimMismatch.
  void upsert(const std::string& node_id, const SemanticVector& v);

  // Returns true iff the id was present.
  bool remove(const std::string& node_id);

  /// Top-k by cosine similarity, descending; ties break by ascending
  /// node_id. Returns exactly min(k, size()) results.
  std::vector<std::pair<std::string, double>> knn(const SemanticVector& query, size_t k) const;

  size_t size() const;
  bool contains(const std::string& node_id) const;
  uint32_t text_dim() const { return text_dim_; }
  uint32_t image_dim() const { return image_dim_; }

 private:
  void check_dims(const SemanticVector& v) const;

  uint32_t text_dim_;
  uint32_t image_dim_;
  std::map<std::string, SemanticVector> entries_;
  mutable std::shared_mutex mu_;
};

}  // namespace hymem
