#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "hymem/memory_graph.hpp"
#include "hymem/types.hpp"

namespace hymem {

/// Compression bench: `instances` synthetic trajectories drawn round-robin
/// from `templates` task templates, ingested with the mock providers. The
/// template-matching mock judge merges duplicates, so the node count must
/// plateau at the template count.
struct CompressionBenchOptions {
  size_t templates = 200;
  size_t instances = 1000;
  uint64_t seed = 42;
  size_t ingest_k = 5;
  StoreParams params;
};

struct CompressionBenchResult {
  std::vector<std::pair<size_t, size_t>> curve;  // (ingested_count, node_count)
  size_t added = 0;
  size_t merged = 0;
  size_t replaced = 0;
  size_t failed = 0;
  size_t final_node_count = 0;
};

// Deterministic synthetic trajectory for a template. Instances of one
// template share task text and first screenshot, so they collapse under the
// duplicate-matching judge.
TrajectoryRecord synthetic_trajectory(size_t template_id, size_t instance_idx);

// When keep_graph is non-null it receives the populated store.
CompressionBenchResult run_compression_bench(const CompressionBenchOptions& options,
                                             std::unique_ptr<MemoryGraph>* keep_graph = nullptr);

void write_bench_csv(const CompressionBenchResult& result, std::ostream& out);

}  // namespace hymem
