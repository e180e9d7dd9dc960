#include "hymem/bench.hpp"

#include "hymem/evolution.hpp"
#include "hymem/hash.hpp"
#include "hymem/mock_providers.hpp"

namespace hymem {

TrajectoryRecord synthetic_trajectory(size_t template_id, size_t instance_idx) {
  std::string tid = std::to_string(template_id);
  TrajectoryRecord traj;
  traj.id = "traj-" + std::to_string(instance_idx);
  traj.task_text = "Find the best matching result for scenario " + tid;

  ImageRef obs;
  obs.uri = "synthetic://screens/tpl-" + tid + ".png";
  uint64_t h = fnv1a64(obs.uri);
  for (size_t i = 0; i < obs.content_hash.size(); i += 8) {
    h = splitmix64(h);
    for (size_t b = 0; b < 8; ++b) obs.content_hash[i + b] = static_cast<uint8_t>(h >> (8 * b));
  }
  traj.observations.push_back(std::move(obs));

  traj.actions.push_back({"click", "search-box"});
  traj.actions.push_back({"type", "scenario " + tid});
  traj.actions.push_back({"click", "result-" + tid});
  traj.domain_tag = "domain-" + std::to_string(template_id % 10);
  traj.source = TrajectorySource::agent_rollout;
  return traj;
}

CompressionBenchResult run_compression_bench(const CompressionBenchOptions& options,
                                             std::unique_ptr<MemoryGraph>* keep_graph) {
  if (options.templates == 0) throw ConfigError("bench needs at least one template");

  MockEncoder encoder(options.seed, options.params);
  MockJudge judge;
  auto graph = std::make_unique<MemoryGraph>(options.params);
  EvolutionPipeline pipeline(*graph, encoder, judge);

  CompressionBenchResult result;
  result.curve.reserve(options.instances);
  for (size_t i = 0; i < options.instances; ++i) {
    TrajectoryRecord traj = synthetic_trajectory(i % options.templates, i);
    try {
      IngestReport report = pipeline.ingest(traj, options.ingest_k);
      switch (report.decision.action) {
        case EvolutionDecision::Action::add: ++result.added; break;
        case EvolutionDecision::Action::merge: ++result.merged; break;
        case EvolutionDecision::Action::replace: ++result.replaced; break;
      }
    } catch (const Error&) {
      ++result.failed;
    }
    result.curve.emplace_back(i + 1, graph->node_count());
  }
  result.final_node_count = graph->node_count();
  if (keep_graph) *keep_graph = std::move(graph);
  return result;
}

void write_bench_csv(const CompressionBenchResult& result, std::ostream& out) {
  out << "ingested_count,node_count\n";
  for (const auto& [ingested, nodes] : result.curve) {
    out << ingested << "," << nodes << "\n";
  }
}

}  // namespace hymem
