#pragma once

// HTTP facade over a Session. Handlers are plain functions of the request so
// they can be exercised without a socket; serve() wires them to cpp-httplib.

#include <atomic>
#include <map>
#include <memory>
#include <string>

#include "posthoc/app/session.hpp"

namespace posthoc::app {

struct ApiResponse {
  int status = 200;
  std::string body;
};

class Api {
 public:
  /// Publishes the session; every endpoint answers 503 until this is called.
  /// A session can be published once.
  void publish(std::shared_ptr<const Session> session);
  bool ready() const noexcept { return current_.load(std::memory_order_acquire) != nullptr; }

  ApiResponse meta() const;
  ApiResponse points() const;
  /// Body: {"selection": [ids] | "spec" | {"ids": [...]} | {"predicate": "spec"},
  ///        "method": "simes", "template": "beta", "k0": 1}
  ApiResponse bound(const std::string& body) const;
  ApiResponse envelope(const std::map<std::string, std::string>& query) const;

 private:
  std::shared_ptr<const Session> owner_;
  std::atomic<const Session*> current_{nullptr};
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

/// Blocks serving `api` until the process stops or stop() is called on the
/// returned handle from another thread.
class HttpServer {
 public:
  explicit HttpServer(const Api& api, ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; returns the bound port (useful with port 0).
  int bind();
  /// Runs the accept loop on the calling thread after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace posthoc::app
