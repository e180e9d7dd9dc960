#include "hymem/http_service.hpp"

#include <functional>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hymem/image_io.hpp"
#include "hymem/wire_json.hpp"

namespace hymem {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string require_body_string(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ConfigError(std::string("missing field: ") + field);
  }
  return it->get<std::string>();
}

json parse_body(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("body is not a JSON object");
  return j;
}

// Maps engine errors onto the endpoint status contract.
void run_handler(httplib::Response& res, const std::function<std::pair<int, json>()>& fn) {
  try {
    auto [status, body] = fn();
    reply(res, status, body);
  } catch (const InvalidTrajectory& e) {
    reply(res, 400, {{"error", "InvalidTrajectory"}, {"message", e.what()}});
  } catch (const ConfigError& e) {
    reply(res, 400, {{"error", "MalformedBody"}, {"message", e.what()}});
  } catch (const UnknownTarget& e) {
    reply(res, 404, {{"error", "UnknownTarget"}, {"message", e.what()}});
  } catch (const DuplicateId& e) {
    reply(res, 409, {{"error", "DuplicateId"}, {"message", e.what()}});
  } catch (const EmptyStore& e) {
    reply(res, 409, {{"error", "EmptyStore"}, {"message", e.what()}});
  } catch (const EncoderFailure& e) {
    reply(res, 503, {{"error", "EncoderFailure"}, {"message", e.what()}});
  } catch (const JudgeFailure& e) {
    reply(res, 503, {{"error", "JudgeFailure"}, {"message", e.what()}});
  } catch (const Error& e) {
    reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
  }
}

}  // namespace

struct HttpService::Impl {
  MemoryEngine& engine;
  std::optional<std::filesystem::path> snapshot_path;
  httplib::Server server;

  Impl(MemoryEngine& eng, std::optional<std::filesystem::path> path)
      : engine(eng), snapshot_path(std::move(path)) {
    register_routes();
  }

  std::optional<RetrievalConfig> config_of(const json& body) {
    auto it = body.find("config");
    if (it == body.end()) return std::nullopt;
    return retrieval_config_from_json(*it, engine.default_retrieval());
  }

  void register_routes() {
    server.Post("/v1/trajectories", [this](const httplib::Request& req, httplib::Response& res) {
      run_handler(res, [&]() -> std::pair<int, json> {
        TrajectoryRecord traj = trajectory_from_json(parse_body(req));
        IngestReport report = engine.ingest(traj);
        if (snapshot_path) engine.save(*snapshot_path);
        spdlog::info("ingest {} -> {} ({})", traj.id, report.node_id,
                     to_string(report.decision.action));
        return {200, ingest_report_to_json(report)};
      });
    });

    server.Post("/v1/retrieve", [this](const httplib::Request& req, httplib::Response& res) {
      run_handler(res, [&]() -> std::pair<int, json> {
        json body = parse_body(req);
        std::string task = require_body_string(body, "task_text");
        ImageRef obs = make_image_ref(require_body_string(body, "screenshot_uri"));
        RetrievalResult result = engine.retrieve(task, obs, config_of(body));
        return {200, retrieval_result_to_json(result)};
      });
    });

    server.Post("/v1/working-memory", [this](const httplib::Request& req,
                                             httplib::Response& res) {
      run_handler(res, [&]() -> std::pair<int, json> {
        json body = parse_body(req);
        std::string task = require_body_string(body, "task_text");
        ImageRef obs = make_image_ref(require_body_string(body, "screenshot_uri"));
        WorkingMemory wm = engine.create_working_memory(task, obs, config_of(body));
        spdlog::info("working memory {} created ({} nodes)", wm.wm_id,
                     wm.attached_nodes.size());
        return {200, working_memory_to_json(wm)};
      });
    });

    server.Post(R"(/v1/working-memory/([^/]+)/refresh)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  run_handler(res, [&]() -> std::pair<int, json> {
                    json body = parse_body(req);
                    ImageRef prev = make_image_ref(require_body_string(body, "prev_obs_uri"));
                    ImageRef cur = make_image_ref(require_body_string(body, "cur_obs_uri"));
                    RefreshOutcome outcome =
                        engine.refresh_working_memory(req.matches[1], prev, cur);
                    spdlog::info("refresh {} -> {}", std::string(req.matches[1]),
                                 outcome.refreshed ? "refreshed" : "kept");
                    return {200, refresh_outcome_to_json(outcome)};
                  });
                });

    server.Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
      run_handler(res, [&]() -> std::pair<int, json> {
        return {200, stats_to_json(engine.stats())};
      });
    });
  }
};

HttpService::HttpService(MemoryEngine& engine, std::optional<std::filesystem::path> snapshot_path)
    : impl_(std::make_unique<Impl>(engine, std::move(snapshot_path))) {}

HttpService::~HttpService() = default;

int HttpService::bind_any(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

void HttpService::listen_after_bind() { impl_->server.listen_after_bind(); }

bool HttpService::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void HttpService::stop() { impl_->server.stop(); }

}  // namespace hymem
