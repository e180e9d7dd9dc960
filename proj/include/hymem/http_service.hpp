#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hymem/engine.hpp"

namespace hymem {

/// HTTP sidecar over a MemoryEngine.
///
/// Endpoints (all bodies JSON):
///   POST /v1/trajectories                     ingest one record -> IngestReport
///   POST /v1/retrieve                         {task_text, screenshot_uri, config?}
///   POST /v1/working-memory                   {task_text, screenshot_uri, config?}
///   POST /v1/working-memory/{id}/refresh      {prev_obs_uri, cur_obs_uri}
///   GET  /v1/stats
///
/// Error mapping: 400 malformed body, 404 unknown wm/node, 409 duplicate
/// trajectory id or empty store, 503 provider down.
class HttpService {
 public:
  explicit HttpService(MemoryEngine& engine,
                       std::optional<std::filesystem::path> snapshot_path = std::nullopt);
  ~HttpService();

  // Binds to an ephemeral port on host; returns the port (tests use this).
  int bind_any(const std::string& host = "127.0.0.1");
  void listen_after_bind();  // blocking

  bool listen(const std::string& host, int port);  // blocking
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hymem
