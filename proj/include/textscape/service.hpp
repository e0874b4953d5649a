#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "textscape/api.hpp"

namespace textscape {

struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end over a Registry. Query routes never modify the registry;
/// POST /api/admin/datasets is the only write path.
class Service {
 public:
  Service(std::shared_ptr<Registry> registry, ServeConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the socket and returns the bound port. Throws Errc::io_error.
  int bind();
  /// Serves until stop(); call bind() first.
  void listen();
  void stop();
  /// Blocks until the listener accepts connections.
  void wait_until_ready() const;

  Registry& registry() { return *registry_; }

 private:
  struct Impl;
  std::shared_ptr<Registry> registry_;
  std::unique_ptr<Impl> impl_;
};

/// Response body and status for one request, independent of the transport.
struct RouteResult {
  int status = 200;
  nlohmann::json body;
};

/// Routes a request against the registry. `path` excludes the query string.
RouteResult handle_request(Registry& registry, const std::string& method, const std::string& path,
                           const QueryParams& query, const std::string& body);

}  // namespace textscape
