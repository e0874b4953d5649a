#include "textscape/service.hpp"

#include <mutex>
#include <vector>

#include <httplib.h>

namespace textscape {
namespace {

using nlohmann::json;

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_argument, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::mutex& admin_mutex() {
  static std::mutex m;
  return m;
}

RouteResult admin_load(Registry& registry, const QueryParams& query, const std::string& body) {
  if (!query.empty()) throw Error(Errc::invalid_argument, "unknown parameter \"" + query.begin()->first + "\"");
  const auto doc = parse_body(body);
  if (!doc.is_object()) throw Error(Errc::invalid_argument, "load request must be an object");
  std::lock_guard lock(admin_mutex());
  std::shared_ptr<const DatasetEntry> entry;
  if (doc.contains("store")) {
    if (doc.size() != 1) throw Error(Errc::invalid_argument, "a store load request takes only \"store\"");
    const std::filesystem::path dir = doc.at("store").get<std::string>();
    const auto manifest = read_manifest(dir);
    for (const auto& e : registry.list()) {
      if (e->id == manifest.id) throw Error(Errc::dataset_exists, "dataset " + manifest.id + " is already loaded");
    }
    entry = load_entry(dir);
  } else {
    const auto manifest = Manifest::from_json(doc, std::filesystem::current_path());
    for (const auto& e : registry.list()) {
      if (e->id == manifest.id) throw Error(Errc::dataset_exists, "dataset " + manifest.id + " is already loaded");
    }
    entry = load_entry(manifest);
  }
  registry.add(entry);
  return {201, dataset_summary(*entry)};
}

}  // namespace

RouteResult handle_request(Registry& registry, const std::string& method, const std::string& path,
                           const QueryParams& query, const std::string& body) {
  try {
    const auto parts = split_path(path);
    auto route_missing = [&]() -> RouteResult {
      throw Error(Errc::route_not_found, "no route for " + method + " " + path);
    };
    if (parts.size() < 2 || parts[0] != "api") return route_missing();

    if (method == "POST") {
      if (parts.size() == 2 && parts[1] == "compare") {
        if (!query.empty()) throw Error(Errc::invalid_argument, "unknown parameter \"" + query.begin()->first + "\"");
        return {200, compare_payload(registry, parse_body(body))};
      }
      if (parts.size() == 3 && parts[1] == "admin" && parts[2] == "datasets") return admin_load(registry, query, body);
      return route_missing();
    }
    if (method != "GET" || parts[1] != "datasets") return route_missing();

    if (parts.size() == 2) {
      if (!query.empty()) throw Error(Errc::invalid_argument, "unknown parameter \"" + query.begin()->first + "\"");
      return {200, datasets_payload(registry)};
    }
    if (parts.size() == 4) {
      const auto& view = parts[3];
      if (view != "points" && view != "local-words" && view != "lists" && view != "confusions" &&
          view != "label-clusters" && view != "hulls") {
        return route_missing();
      }
      const auto entry = registry.get(parts[2]);
      if (view == "points") return {200, points_payload(*entry, query)};
      if (view == "local-words") return {200, local_words_payload(*entry, query)};
      if (view == "lists") return {200, lists_payload(*entry, query)};
      if (view == "confusions") return {200, confusions_payload(*entry, query)};
      if (view == "label-clusters") return {200, label_clusters_payload(*entry, query)};
      return {200, hulls_payload(*entry, query)};
    }
    if (parts.size() == 6 && parts[3] == "samples" && parts[5] == "explanation") {
      const auto entry = registry.get(parts[2]);
      return {200, explanation_payload(*entry, parts[4], query)};
    }
    return route_missing();
  } catch (const Error& e) {
    return {http_status(e.code()), error_payload(e)};
  } catch (const nlohmann::json::exception& e) {
    return {400, error_payload(Error(Errc::invalid_argument, e.what()))};
  } catch (const std::filesystem::filesystem_error& e) {
    return {500, error_payload(Error(Errc::io_error, e.what()))};
  }
}

struct Service::Impl {
  httplib::Server server;
  ServeConfig config;
  int port = 0;
};

Service::Service(std::shared_ptr<Registry> registry, ServeConfig config)
    : registry_(std::move(registry)), impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  if (impl_->config.static_dir && !impl_->server.set_mount_point("/", impl_->config.static_dir->string())) {
    throw Error(Errc::io_error, "cannot serve static assets from " + impl_->config.static_dir->string());
  }
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams query;
    for (const auto& [key, value] : req.params) {
      if (query.count(key)) {
        const auto result = RouteResult{400, error_payload(Error(Errc::invalid_argument,
                                                                  "parameter \"" + key + "\" given twice"))};
        res.status = result.status;
        res.set_content(result.body.dump(), "application/json");
        return;
      }
      query.emplace(key, value);
    }
    const auto result = handle_request(*registry_, req.method, req.path, query, req.body);
    res.status = result.status;
    res.set_content(result.body.dump(), "application/json");
  };
  impl_->server.Get("/api/.*", handler);
  impl_->server.Post("/api/.*", handler);
  impl_->server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status != 404 || req.path.rfind("/api/", 0) == 0) return;
    const Error missing(Errc::route_not_found, "no route for " + req.method + " " + req.path);
    res.set_content(error_payload(missing).dump(), "application/json");
  });
}

Service::~Service() { stop(); }

int Service::bind() {
  auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->server.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) {
    throw Error(Errc::io_error, "cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return impl_->port;
}

void Service::listen() {
  if (!impl_->server.listen_after_bind()) {
    throw Error(Errc::io_error, "listener on port " + std::to_string(impl_->port) + " failed");
  }
}

void Service::stop() {
  if (impl_) impl_->server.stop();
}

void Service::wait_until_ready() const {
  impl_->server.wait_until_ready();
}

}  // namespace textscape
