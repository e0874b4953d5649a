#pragma once

#include <memory>
#include <thread>

#include <Eigen/Dense>
#include <httplib.h>

#include "textscape/service.hpp"

namespace textscape::testing {

/// Service on an ephemeral localhost port, listening on a background thread.
class RunningService {
 public:
  explicit RunningService(std::shared_ptr<Registry> registry, ServeConfig config = {})
      : service_(std::move(registry), with_ephemeral_port(std::move(config))) {
    port_ = service_.bind();
    thread_ = std::thread([this] { service_.listen(); });
    service_.wait_until_ready();
  }
  ~RunningService() {
    service_.stop();
    if (thread_.joinable()) thread_.join();
  }
  RunningService(const RunningService&) = delete;
  RunningService& operator=(const RunningService&) = delete;

  int port() const { return port_; }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

 private:
  static ServeConfig with_ephemeral_port(ServeConfig c) {
    c.host = "127.0.0.1";
    c.port = 0;
    return c;
  }

  Service service_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace textscape::testing
