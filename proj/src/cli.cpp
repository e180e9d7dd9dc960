#include "hymem/cli.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hymem/bench.hpp"
#include "hymem/config.hpp"
#include "hymem/engine.hpp"
#include "hymem/http_service.hpp"
#include "hymem/image_io.hpp"
#include "hymem/wire_json.hpp"

namespace fs = std::filesystem;

namespace hymem::cli {

namespace {

fs::path snapshot_path(const fs::path& store_dir) { return store_dir / "graph.snapshot"; }

// Shared provider/config flags. CLI values override file and environment.
struct CommonFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> provider;
  std::optional<std::string> embed_endpoint;
  std::optional<std::string> judge_endpoint;
  std::optional<uint64_t> seed;
  std::optional<size_t> k;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Config file (key=value lines)");
    cmd->add_option("--provider", provider, "Provider backend: mock or remote");
    cmd->add_option("--embed-endpoint", embed_endpoint, "Embedding service base URL");
    cmd->add_option("--judge-endpoint", judge_endpoint, "Judge service base URL");
    cmd->add_option("--seed", seed, "Seed for the mock providers");
    cmd->add_option("--k", k, "Neighbors shown to the evolution judge");
  }

  ServiceConfig resolve() const {
    ServiceConfig cfg = resolve_config(
        config_file ? std::optional<fs::path>(*config_file) : std::nullopt);
    if (provider) cfg.provider = *provider;
    if (embed_endpoint) cfg.embed_endpoint = *embed_endpoint;
    if (judge_endpoint) cfg.judge_endpoint = *judge_endpoint;
    if (seed) cfg.seed = *seed;
    if (k) cfg.ingest_k = *k;
    return cfg;
  }
};

std::unique_ptr<MemoryGraph> open_or_create_store(const fs::path& store_dir,
                                                  const StoreParams& params) {
  fs::path snap = snapshot_path(store_dir);
  if (fs::exists(snap)) return MemoryGraph::load_snapshot(snap);
  fs::create_directories(store_dir);
  return std::make_unique<MemoryGraph>(params);
}

int run_ingest(const std::string& input, const std::string& store, const CommonFlags& flags,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(input);
  if (!in) {
    err << "cannot read input file: " << input << "\n";
    return kInputUnreadable;
  }

  ServiceConfig cfg = flags.resolve();
  auto graph = open_or_create_store(store, cfg.params);
  cfg.params = graph->params();  // an existing snapshot pins the dimensions
  auto [encoder, judge] = make_providers(cfg);
  MemoryEngine engine(std::move(graph), encoder, judge, cfg.ingest_k);

  size_t added = 0, merged = 0, replaced = 0, failed = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      IngestReport report = engine.ingest(trajectory_from_jsonl_line(line));
      switch (report.decision.action) {
        case EvolutionDecision::Action::add: ++added; break;
        case EvolutionDecision::Action::merge: ++merged; break;
        case EvolutionDecision::Action::replace: ++replaced; break;
      }
    } catch (const Error& e) {
      ++failed;
      spdlog::warn("{}:{}: {}", input, line_no, e.what());
    }
  }
  engine.save(snapshot_path(store));
  out << "added=" << added << " merged=" << merged << " replaced=" << replaced
      << " failed=" << failed << "\n";
  return kOk;
}

int run_query(const std::string& store, const std::string& task, const std::string& screenshot,
              const RetrievalConfig& rcfg, const CommonFlags& flags, std::ostream& out,
              std::ostream& err) {
  fs::path snap = snapshot_path(store);
  if (!fs::exists(snap)) {
    err << "store is empty: no snapshot at " << snap.string() << "\n";
    return kEmptyStore;
  }

  ServiceConfig cfg = flags.resolve();
  auto graph = MemoryGraph::load_snapshot(snap);
  cfg.params = graph->params();
  auto [encoder, judge] = make_providers(cfg);
  MemoryEngine engine(std::move(graph), encoder, judge, cfg.ingest_k, rcfg);

  try {
    RetrievalResult result = engine.retrieve(task, make_image_ref(screenshot));
    out << retrieval_result_to_json(result).dump(2) << "\n";
  } catch (const EmptyStore& e) {
    err << e.what() << "\n";
    return kEmptyStore;
  }
  return kOk;
}

int run_serve(const std::string& store, const std::string& host, int port,
              const CommonFlags& flags, std::ostream& err) {
  ServiceConfig cfg = flags.resolve();
  auto graph = open_or_create_store(store, cfg.params);
  cfg.params = graph->params();
  auto [encoder, judge] = make_providers(cfg);
  MemoryEngine engine(std::move(graph), encoder, judge, cfg.ingest_k);

  HttpService service(engine, snapshot_path(store));
  spdlog::info("serving store {} on {}:{}", store, host, port);
  if (!service.listen(host, port)) {
    err << "cannot listen on " << host << ":" << port << "\n";
    return kFailure;
  }
  return kOk;
}

int run_bench(size_t templates, size_t instances, const std::string& store,
              const std::optional<std::string>& csv_out, const CommonFlags& flags,
              std::ostream& out, std::ostream& err) {
  ServiceConfig cfg = flags.resolve();
  CompressionBenchOptions options;
  options.templates = templates;
  options.instances = instances;
  options.seed = cfg.seed;
  options.ingest_k = cfg.ingest_k;
  options.params = cfg.params;

  std::unique_ptr<MemoryGraph> graph;
  CompressionBenchResult result = run_compression_bench(options, &graph);

  if (csv_out) {
    std::ofstream f(*csv_out);
    if (!f) {
      err << "cannot write " << *csv_out << "\n";
      return kFailure;
    }
    write_bench_csv(result, f);
  } else {
    write_bench_csv(result, out);
  }
  if (!store.empty()) {
    fs::create_directories(store);
    graph->save_snapshot(snapshot_path(store));
  }
  spdlog::info("bench: added={} merged={} replaced={} failed={} final_nodes={}", result.added,
               result.merged, result.replaced, result.failed, result.final_node_count);

  if (result.final_node_count > templates) {
    err << "compression violated: " << result.final_node_count << " nodes from " << templates
        << " templates\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // Logs go to stderr; stdout is reserved for command output (JSON / CSV).
  static std::once_flag logger_once;
  std::call_once(logger_once, [] {
    spdlog::set_default_logger(spdlog::stderr_color_mt("hymem"));
  });

  CLI::App app{"Self-evolving graph memory engine for GUI agents"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_store;
  CommonFlags ingest_flags;
  auto* ingest = app.add_subcommand("ingest", "Ingest a JSONL trajectory file");
  ingest->add_option("--input", ingest_input, "JSONL file, one trajectory per line")
      ->required();
  ingest->add_option("--store", ingest_store, "Store directory")->required();
  ingest_flags.attach(ingest);

  // query
  std::string query_store, query_task, query_screenshot;
  RetrievalConfig query_cfg;
  CommonFlags query_flags;
  auto* query = app.add_subcommand("query", "Structured retrieval against a store");
  query->add_option("--store", query_store, "Store directory")->required();
  query->add_option("--task", query_task, "Task text")->required();
  query->add_option("--screenshot", query_screenshot, "Current screenshot path or URI")
      ->required();
  query->add_option("--n", query_cfg.n_total, "Total items to return");
  auto* seeds_opt = query->add_option("--seeds", query_cfg.n_seed, "kNN seed count");
  query->add_option("--expand", query_cfg.expand_per_seed, "Per-seed expansion cap");
  query->add_option("--hops", query_cfg.iterations, "Expansion iterations");
  query_flags.attach(query);

  // serve
  std::string serve_store, serve_host = "127.0.0.1";
  int serve_port = 8089;
  CommonFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP sidecar");
  serve->add_option("--store", serve_store, "Store directory")->required();
  serve->add_option("--port", serve_port, "Listen port")->required();
  serve->add_option("--host", serve_host, "Bind address");
  serve_flags.attach(serve);

  // bench-compression
  size_t bench_templates = 200, bench_instances = 1000;
  std::string bench_store;
  std::optional<std::string> bench_csv;
  CommonFlags bench_flags;
  auto* bench = app.add_subcommand("bench-compression",
                                   "Duplicate-heavy ingestion growth curve (mock providers)");
  bench->add_option("--templates", bench_templates, "Distinct task templates");
  bench->add_option("--instances", bench_instances, "Trajectories to ingest");
  bench->add_option("--store", bench_store, "Store directory for the resulting snapshot");
  bench->add_option("--out", bench_csv, "CSV output path (default: stdout)");
  bench_flags.attach(bench);

  std::vector<const char*> argv;
  argv.push_back("hymem");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (ingest->parsed()) return run_ingest(ingest_input, ingest_store, ingest_flags, out, err);
    if (query->parsed()) {
      // A bare --n below the default seed count shrinks the seed set with it.
      if (seeds_opt->count() == 0 && query_cfg.n_seed > query_cfg.n_total) {
        query_cfg.n_seed = query_cfg.n_total;
      }
      return run_query(query_store, query_task, query_screenshot, query_cfg, query_flags, out,
                       err);
    }
    if (serve->parsed()) return run_serve(serve_store, serve_host, serve_port, serve_flags, err);
    if (bench->parsed()) {
      return run_bench(bench_templates, bench_instances, bench_store, bench_csv, bench_flags,
                       out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace hymem::cli
