// Acceptance suite: one test case per criterion, each printing a single
// "criterion N (...): PASS|FAIL" line. Run via `ctest -R acceptance` or
// directly as build/tests/hymem_acceptance.

#include <doctest.h>

#include <sys/resource.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "hymem/bench.hpp"
#include "hymem/evolution.hpp"
#include "hymem/prompts.hpp"
#include "hymem/retrieval.hpp"
#include "hymem/working_memory.hpp"
#include "reference_retrieval.hpp"
#include "test_util.hpp"

using namespace hymem;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int num;
  std::string name;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool pass() const { return failures.empty(); }
  void report() const {
    std::printf("criterion %d (%s): %s\n", num, name.c_str(), pass() ? "PASS" : "FAIL");
    for (const std::string& f : failures) std::printf("    failed: %s\n", f.c_str());
    std::fflush(stdout);
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SemanticVector mock_vector(MockEncoder& enc, const std::string& salt) {
  SemanticVector v;
  v.text_part = enc.embed_text("text " + salt);
  v.image_part = enc.embed_image(test::test_image("mem://" + salt + ".png"));
  return v;
}

double scalar_cosine(const SemanticVector& a, const SemanticVector& b) {
  double dot = 0, na = 0, nb = 0;
  auto acc = [&](const std::vector<float>& x, const std::vector<float>& y) {
    for (size_t i = 0; i < x.size(); ++i) {
      dot += double(x[i]) * double(y[i]);
      na += double(x[i]) * double(x[i]);
      nb += double(y[i]) * double(y[i]);
    }
  };
  acc(a.text_part, b.text_part);
  acc(a.image_part, b.image_part);
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> random_tag_list(std::mt19937_64& rng, size_t pool, size_t max_count) {
  std::set<std::string> tags;
  size_t count = 1 + rng() % max_count;
  while (tags.size() < count) tags.insert("#t" + std::to_string(rng() % pool));
  return {tags.begin(), tags.end()};
}

}  // namespace

TEST_CASE("criterion 1: knn oracle equivalence") {
  Criterion c{1, "knn oracle equivalence"};
  auto start = std::chrono::steady_clock::now();

  StoreParams params;  // full 512+512 dims
  MockEncoder enc(1001, params);
  VectorIndex index(params.text_dim, params.image_dim);
  std::vector<std::pair<std::string, SemanticVector>> entries;
  for (int i = 0; i < 1000; ++i) {
    std::string id = "n" + std::to_string(i);
    SemanticVector v = mock_vector(enc, std::to_string(i));
    index.upsert(id, v);
    entries.emplace_back(id, v);
  }

  for (int q = 0; q < 10; ++q) {
    SemanticVector query = mock_vector(enc, "query" + std::to_string(q));

    std::vector<std::pair<std::string, double>> ranked;
    for (const auto& [id, v] : entries) ranked.emplace_back(id, scalar_cosine(query, v));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    for (size_t k : {1u, 5u, 10u, 50u}) {
      auto got = index.knn(query, k);
      c.expect(got.size() == k, "result size for k=" + std::to_string(k));
      for (size_t i = 0; i < got.size(); ++i) {
        c.expect(got[i].first == ranked[i].first,
                 "id mismatch at rank " + std::to_string(i) + " for k=" + std::to_string(k));
        c.expect(std::abs(got[i].second - ranked[i].second) <= 1e-6,
                 "similarity drift at rank " + std::to_string(i));
      }
    }
  }
  double elapsed = seconds_since(start);
  c.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s >= 5s");

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 1 failed");
}

TEST_CASE("criterion 2: semantic vector contract") {
  Criterion c{2, "semantic vector contract (norms + cosine oracle)"};
  StoreParams params;
  MockEncoder enc(1002, params);
  std::mt19937_64 rng(2);

  std::vector<SemanticVector> vectors;
  for (int i = 0; i < 500; ++i) {
    std::string task = "task " + std::to_string(rng());
    SemanticVector v = build_semantic_vector(
        task, test::test_image("mem://obs-" + std::to_string(i) + ".png"), enc);
    double nt = 0, ni = 0;
    for (float x : v.text_part) nt += double(x) * x;
    for (float x : v.image_part) ni += double(x) * x;
    c.expect(std::abs(std::sqrt(nt) - 1.0) <= 1e-6, "text norm off at pair " + std::to_string(i));
    c.expect(std::abs(std::sqrt(ni) - 1.0) <= 1e-6,
             "image norm off at pair " + std::to_string(i));
    vectors.push_back(std::move(v));
  }
  for (size_t i = 0; i < vectors.size(); ++i) {
    const SemanticVector& a = vectors[i];
    const SemanticVector& b = vectors[(i + 137) % vectors.size()];
    c.expect(std::abs(a.cosine(b) - scalar_cosine(a, b)) <= 1e-9,
             "cosine differs from the scalar oracle at pair " + std::to_string(i));
  }

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 2 failed");
}

TEST_CASE("criterion 3: evolution pipeline conservation") {
  Criterion c{3, "evolution pipeline conservation over 500 scripted ops"};
  StoreParams params{32, 32, 8, 2};
  MockEncoder enc(1003, params);

  ScriptedJudge judge;
  judge.on_strategy = [](const TrajectoryRecord& t) { return "strategy for " + t.id; };
  judge.on_tags = [](const std::string& s) {
    return "#" + s.substr(s.size() - 1) + ", #shared" + s.substr(s.size() - 1);
  };
  std::mt19937_64 judge_rng(12345);
  judge.on_evolution = [&judge_rng](const CandidateView&,
                                    const std::vector<CandidateView>& nbrs) -> std::string {
    uint64_t roll = judge_rng() % 10;
    if (roll < 4) return R"({"action":"add","reasoning":"new"})";
    if (roll < 8) {
      return R"({"action":"update","target_id":")" + nbrs.front().id +
             R"(","updated_takeaway":"takeaway: consolidated","updated_tags":["#m","#k"]})";
    }
    return R"({"action":"replace","old_id":")" + nbrs.front().id + R"("})";
  };

  MemoryGraph graph(params);
  EvolutionPipeline pipeline(graph, enc, judge);
  std::mt19937_64 rng(54321);
  size_t violations = 0;

  for (int op = 0; op < 500; ++op) {
    size_t nodes_before = graph.node_count();
    GraphStats before = graph.stats();
    TrajectoryRecord traj = test::make_trajectory(
        "t" + std::to_string(op), "task " + std::to_string(rng() % 900),
        "mem://" + std::to_string(op) + ".png");
    IngestReport report = pipeline.ingest(traj);

    GraphStats after = graph.stats();
    bool ok = true;
    switch (report.decision.action) {
      case EvolutionDecision::Action::add:
        ok = graph.node_count() == nodes_before + 1 && after.merge_total == before.merge_total &&
             after.replace_total == before.replace_total;
        break;
      case EvolutionDecision::Action::merge:
        ok = graph.node_count() == nodes_before &&
             after.merge_total == before.merge_total + 1 &&
             graph.node(report.node_id).merge_count > 0;
        break;
      case EvolutionDecision::Action::replace:
        ok = graph.node_count() == nodes_before &&
             after.replace_total == before.replace_total + 1 &&
             graph.contains_node(report.node_id);
        break;
    }
    if (!ok) ++violations;
    if (graph.rebuild_tag_index() != graph.tag_index()) ++violations;
    if (!graph.integrity_errors().empty()) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " invariant violations");
  c.expect(graph.stats().merge_total > 50, "script produced too few merges to be meaningful");
  c.expect(graph.stats().replace_total > 20, "script produced too few replaces");

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 3 failed");
}

TEST_CASE("criterion 4: compression under duplicate-heavy ingestion") {
  Criterion c{4, "sublinear growth: 1000 instances over 200 templates"};
  auto start = std::chrono::steady_clock::now();

  CompressionBenchOptions options;  // 200 templates, 1000 instances, default dims
  CompressionBenchResult result = run_compression_bench(options);

  c.expect(result.final_node_count == 200,
           "final node count " + std::to_string(result.final_node_count) + " != 200");
  c.expect(result.merged >= 800, "merge count " + std::to_string(result.merged) + " < 800");
  c.expect(result.failed == 0, "failed ingests");

  // Growth curve: monotone nondecreasing, and flat (second differences <= 0)
  // once every template has been seen.
  bool monotone = true, concave_after = true;
  for (size_t i = 1; i < result.curve.size(); ++i) {
    if (result.curve[i].second < result.curve[i - 1].second) monotone = false;
  }
  for (size_t i = options.templates + 1; i + 1 < result.curve.size(); ++i) {
    long d1 = long(result.curve[i].second) - long(result.curve[i - 1].second);
    long d2 = long(result.curve[i + 1].second) - long(result.curve[i].second);
    if (d2 > d1) concave_after = false;
  }
  c.expect(monotone, "node count decreased somewhere");
  c.expect(concave_after, "growth accelerated after template saturation");

  double elapsed = seconds_since(start);
  c.expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s >= 60s");

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 4 failed");
}

TEST_CASE("criterion 5: structured retrieval matches the reference implementation") {
  Criterion c{5, "seed-and-expand equals the reference; degenerate config equals knn"};
  StoreParams params{16, 16, 4, 2};
  MockEncoder enc(1005, params);
  MemoryGraph graph(params);
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 50; ++i) {
    graph.apply_add(test::make_node(enc, "n" + std::to_string(100 + i),
                                    random_tag_list(rng, 9, 3)));
  }

  RetrievalConfig cfg;  // n_total 10, n_seed 5, expand 5, t 1
  for (int probe = 0; probe < 20; ++probe) {
    SemanticVector q = mock_vector(enc, "probe" + std::to_string(probe));
    RetrievalResult got = structured_retrieve(graph, q, cfg);
    auto expected = reference::reference_retrieve(graph, q, cfg);

    bool same = got.items.size() == expected.size();
    for (size_t i = 0; same && i < expected.size(); ++i) {
      same = got.items[i].node_id == expected[i].id &&
             to_string(got.items[i].origin) == expected[i].origin &&
             std::abs(got.items[i].score - expected[i].score) <= 1e-9;
    }
    c.expect(same, "probe " + std::to_string(probe) + " diverges from the reference");
  }

  RetrievalConfig degenerate;
  degenerate.n_total = 10;
  degenerate.n_seed = 10;
  degenerate.iterations = 0;
  for (int probe = 0; probe < 10; ++probe) {
    SemanticVector q = mock_vector(enc, "flat" + std::to_string(probe));
    RetrievalResult got = structured_retrieve(graph, q, degenerate);
    auto knn = graph.knn(q, 10);
    bool same = got.items.size() == knn.size();
    for (size_t i = 0; same && i < knn.size(); ++i) {
      same = got.items[i].node_id == knn[i].first &&
             got.items[i].origin.kind == ItemOrigin::Kind::seed &&
             std::abs(got.items[i].score - knn[i].second) <= 1e-12;
    }
    c.expect(same, "degenerate probe " + std::to_string(probe) + " is not plain knn");
  }

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 5 failed");
}

TEST_CASE("criterion 6: wire-format fidelity and parser robustness") {
  Criterion c{6, "golden prompts byte-exact; parsers fuzz-safe; fallbacks ADD/KEEP"};

  // Golden: evolution prompt.
  {
    CandidateView incoming;
    incoming.id = "new-1";
    incoming.task_description = "Find a USB-C hub under $30";
    incoming.takeaway = "apply the price filter low-to-high before comparing items";
    incoming.tags = {normalize_tag("#search"), normalize_tag("#filter"),
                     normalize_tag("$price")};
    incoming.domain = "shopping";
    incoming.screenshot_uri = "mem://screens/new-1.png";

    CandidateView n1;
    n1.id = "n000017";
    n1.task_description = "Find a cheap HDMI cable";
    n1.takeaway = "sort results by price ascending to surface budget options";
    n1.tags = {normalize_tag("#search"), normalize_tag("$price")};
    n1.domain = "shopping";
    n1.screenshot_uri = "mem://screens/n17.png";
    n1.similarity = 0.87654;

    CandidateView n2;
    n2.id = "n000042";
    n2.task_description = "Locate wireless keyboards with long battery life";
    n2.takeaway = "use the brand and feature filters to narrow the list";
    n2.tags = {normalize_tag("#compare"), normalize_tag("#filter")};
    n2.domain = "shopping";
    n2.screenshot_uri = "mem://screens/n42.png";
    n2.similarity = 0.4999;

    c.expect(render_evolution_prompt(incoming, {n1, n2}).full_text() ==
                 test::read_golden("evolution_prompt.txt"),
             "evolution prompt differs from golden file");
  }

  // Golden: digestion prompt.
  c.expect(render_digestion_prompt(
               "Book a table for two tonight", test::test_image("mem://screens/cur.png"),
               {"filter restaurants by rating before choosing (tags: #filter, #rating)",
                "use the date picker to set the reservation time (tags: #date-picker, "
                "#reserve)",
                "confirm availability from the details page (tags: #confirm, #details)"})
               .full_text() == test::read_golden("digestion_prompt.txt"),
           "digestion prompt differs from golden file");

  // Golden: refresh prompt.
  c.expect(render_refresh_prompt("Compare two phone plans",
                                 test::test_image("mem://screens/step-3.png"),
                                 test::test_image("mem://screens/step-4.png"),
                                 "Use the comparison table and focus on data limits.",
                                 {{"n1", "open the plan comparison table"},
                                  {"n2", "sort plans by monthly cost"},
                                  {"n3", "check coverage map before deciding"}})
               .full_text() == test::read_golden("refresh_prompt.txt"),
           "refresh prompt differs from golden file");

  // Fuzz: evolution decisions.
  {
    const std::set<std::string> ids{"n1", "n2"};
    const std::string valid =
        R"({"action":"update","target_id":"n1","updated_takeaway":"takeaway: x","updated_tags":["#a"]})";
    std::mt19937_64 rng(66);
    size_t crashes = 0;
    for (int i = 0; i < 500; ++i) {
      std::string mutated = valid;
      for (int e = 0; e < 3; ++e) {
        switch (rng() % 3) {
          case 0: if (!mutated.empty()) mutated[rng() % mutated.size()] = static_cast<char>(32 + rng() % 95); break;
          case 1:
            if (!mutated.empty()) mutated.erase(rng() % mutated.size(), 1);
            break;
          default: mutated.resize(rng() % (mutated.size() + 1)); break;
        }
      }
      try {
        parse_evolution_decision(mutated, ids).validate();
      } catch (const MalformedDecision&) {
      } catch (...) {
        ++crashes;
      }
    }
    c.expect(crashes == 0, "evolution parser leaked a non-typed error");
  }

  // Fuzz: refresh decisions.
  {
    const std::set<std::string> slots{"T1", "T2", "T3"};
    const std::string valid = "Decision: UPDATE\nPreserve: T1,T3\nReason: phase";
    std::mt19937_64 rng(67);
    size_t crashes = 0;
    for (int i = 0; i < 500; ++i) {
      std::string mutated = valid;
      for (int e = 0; e < 3; ++e) {
        switch (rng() % 3) {
          case 0: if (!mutated.empty()) mutated[rng() % mutated.size()] = static_cast<char>(32 + rng() % 95); break;
          case 1:
            if (!mutated.empty()) mutated.erase(rng() % mutated.size(), 1);
            break;
          default:
            mutated.insert(rng() % (mutated.size() + 1), 1, static_cast<char>(32 + rng() % 95));
            break;
        }
      }
      try {
        parse_refresh_decision(mutated, slots);
      } catch (const MalformedRefresh&) {
      } catch (...) {
        ++crashes;
      }
    }
    c.expect(crashes == 0, "refresh parser leaked a non-typed error");
  }

  // Fallbacks: malformed judge output must ADD on ingest and KEEP on refresh.
  {
    StoreParams params{16, 16, 4, 2};
    MockEncoder enc(1006, params);
    ScriptedJudge judge;
    judge.on_strategy = [](const TrajectoryRecord& t) { return "strategy " + t.id; };
    judge.on_tags = [](const std::string&) { return "#shared"; };
    judge.on_evolution = [](const CandidateView&, const std::vector<CandidateView>&) {
      return "not even close to JSON";
    };
    judge.on_digest = [](const std::string&, const ImageRef&,
                         const std::vector<std::string>&) { return "guidance"; };
    judge.on_refresh = [](const std::string&, const ImageRef&, const ImageRef&,
                          const std::string&, const std::vector<TakeawayRef>&) {
      return "garbled verdict";
    };

    MemoryGraph graph(params);
    EvolutionPipeline pipeline(graph, enc, judge);
    pipeline.ingest(test::make_trajectory("t1", "alpha", "mem://a.png"));
    IngestReport second = pipeline.ingest(test::make_trajectory("t2", "beta", "mem://b.png"));
    c.expect(second.fallback_used &&
                 second.decision.action == EvolutionDecision::Action::add &&
                 graph.node_count() == 2,
             "malformed evolution verdict did not fall back to ADD");

    WorkingMemory wm = init_working_memory(graph, enc, judge, "alpha",
                                           test::test_image("mem://a.png"), RetrievalConfig{});
    RefreshOutcome outcome =
        maybe_refresh(graph, enc, judge, wm, test::test_image("mem://a.png"),
                      test::test_image("mem://b.png"), RetrievalConfig{});
    c.expect(!outcome.refreshed && outcome.malformed_judge_output,
             "malformed refresh verdict did not default to KEEP");
  }

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 6 failed");
}

TEST_CASE("criterion 7: snapshot persistence round trip") {
  Criterion c{7, "500-node snapshot round trip, bit-exact; truncation rejected"};
  StoreParams params{16, 16, 8, 4};
  MockEncoder enc(1007, params);
  MemoryGraph graph(params);
  std::mt19937_64 rng(7007);
  for (int i = 0; i < 500; ++i) {
    graph.apply_add(test::make_node(enc, "n" + std::to_string(i),
                                    random_tag_list(rng, 80, 4)));
  }
  // A few mutations so counters and lineage are non-trivial.
  for (int m = 0; m < 25; ++m) {
    std::string target = "n" + std::to_string(rng() % 500);
    if (!graph.contains_node(target)) continue;
    graph.apply_merge(target, "consolidated " + std::to_string(m),
                      {normalize_tag("#m" + std::to_string(m)), normalize_tag("#shared")},
                      "merge-traj-" + std::to_string(m),
                      test::make_node(enc, "tmp", {"#x"}).embedding);
  }

  fs::path path = fs::temp_directory_path() / "hymem-acceptance.snapshot";
  graph.save_snapshot(path);
  auto loaded = MemoryGraph::load_snapshot(path);

  c.expect(graphs_equal(graph, *loaded), "field-level graph equality failed");
  c.expect(loaded->integrity_errors().empty(), "loaded graph failed integrity checks");

  size_t float_mismatches = 0;
  for (const auto& [id, node] : graph.nodes()) {
    const MemoryNode& other = loaded->node(id);
    auto bits_differ = [](const std::vector<float>& a, const std::vector<float>& b) {
      return a.size() != b.size() ||
             std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0;
    };
    if (bits_differ(node.semantic.text_part, other.semantic.text_part)) ++float_mismatches;
    if (bits_differ(node.semantic.image_part, other.semantic.image_part)) ++float_mismatches;
    for (size_t r = 0; r < node.embedding.vectors.size(); ++r) {
      if (bits_differ(node.embedding.vectors[r], other.embedding.vectors[r])) {
        ++float_mismatches;
      }
    }
  }
  c.expect(float_mismatches == 0,
           std::to_string(float_mismatches) + " float arrays changed bit patterns");

  // Truncation must be rejected via the checksum/length checks.
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  size_t rejected = 0;
  for (double frac : {0.25, 0.5, 0.9, 0.999}) {
    fs::path cut = fs::temp_directory_path() / "hymem-acceptance-cut.snapshot";
    std::ofstream out(cut, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() * frac));
    out.close();
    try {
      MemoryGraph::load_snapshot(cut);
    } catch (const CorruptSnapshot&) {
      ++rejected;
    }
    fs::remove(cut);
  }
  c.expect(rejected == 4, "a truncated snapshot loaded without CorruptSnapshot");
  fs::remove(path);

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 7 failed");
}

TEST_CASE("criterion 8: paper-scale ingestion and derived-edge stats") {
  Criterion c{8, "2000 trajectories ingested < 120 s; >1e5 derived edges; < 1 GB"};
  auto start = std::chrono::steady_clock::now();

  StoreParams params;  // full-size vectors: 512+512 semantic, 8x3584 blocks
  MockEncoder enc(1008, params);
  MockJudge judge;
  MemoryGraph graph(params);
  EvolutionPipeline pipeline(graph, enc, judge);

  constexpr size_t kInstances = 2000;
  constexpr size_t kTemplates = 1800;  // 200 duplicates exercise merging
  size_t failures = 0;
  for (size_t i = 0; i < kInstances; ++i) {
    TrajectoryRecord traj = synthetic_trajectory(i % kTemplates, i);
    try {
      pipeline.ingest(traj);
    } catch (const Error&) {
      ++failures;
    }
  }
  GraphStats stats = graph.stats();
  double elapsed = seconds_since(start);

  c.expect(failures == 0, std::to_string(failures) + " ingests failed");
  c.expect(stats.node_count == kTemplates,
           "node count " + std::to_string(stats.node_count));
  c.expect(stats.node_count < 2000, "store did not stay under 2000 nodes");
  c.expect(stats.derived_edge_count > 100000,
           "derived edge count " + std::to_string(stats.derived_edge_count) + " <= 1e5");
  c.expect(stats.merge_total == kInstances - kTemplates,
           "merge total " + std::to_string(stats.merge_total));
  c.expect(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s >= 120s");

  struct rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  double peak_gb = static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);
  c.expect(peak_gb < 1.0, "peak RSS " + std::to_string(peak_gb) + " GB >= 1 GB");

  std::printf("    [scale] nodes=%llu edges=%llu merges=%llu elapsed=%.1fs peak=%.2fGB\n",
              static_cast<unsigned long long>(stats.node_count),
              static_cast<unsigned long long>(stats.derived_edge_count),
              static_cast<unsigned long long>(stats.merge_total), elapsed, peak_gb);

  c.report();
  CHECK_MESSAGE(c.pass(), "criterion 8 failed");
}
