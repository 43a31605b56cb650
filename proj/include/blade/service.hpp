#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "blade/error.hpp"
#include "blade/kb.hpp"
#include "blade/mcdm.hpp"

namespace blade {

/// Closed set of machine-readable error codes returned by the HTTP API.
enum class ApiErrorCode { malformed_request, not_found, validation_failed, internal_error };

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);

struct ApiError {
  ApiErrorCode code = ApiErrorCode::internal_error;
  std::string message;
  std::vector<Finding> findings;

  json to_json() const;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Canonical JSON text of a ranking, shared by the CLI and the service.
std::string render_ranking(const RankingResult& result);

/// Transport-independent request handling over an immutable KB snapshot.
/// Only POST /kb/refine replaces the snapshot, atomically.
class Service {
 public:
  explicit Service(KnowledgeBase kb);

  std::shared_ptr<const KnowledgeBase> snapshot() const;

  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body,
                      const std::map<std::string, std::string>& query = {});

 private:
  HttpResponse dispatch(std::string_view method, std::string_view path, std::string_view body,
                        const std::map<std::string, std::string>& query);
  HttpResponse refine(std::string_view body);

  mutable std::mutex snapshot_mutex_;
  std::mutex refine_mutex_;
  std::shared_ptr<const KnowledgeBase> kb_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> ui_dir;  // static assets mounted under /ui
};

/// "host:port", ":port" or "port".
ServeOptions parse_bind_address(std::string_view address);

/// HTTP transport for a Service. Port 0 binds an ephemeral port.
class HttpServer {
 public:
  HttpServer(Service& service, ServeOptions options);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port; throws when binding fails.
  int bind();
  /// Blocks until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads the KB and blocks serving HTTP until the process is stopped.
/// Throws on KB load failure or when the address cannot be bound.
void serve(const std::string& kb_path, const ServeOptions& options);

}  // namespace blade
