#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "infoiter/api.hpp"

namespace infoiter {

/// HTTP front end over an Api, optionally serving static files from a
/// directory at "/". API routes are also reachable under "/api".
class HttpServer {
 public:
  explicit HttpServer(Api& api, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  /// Binds the socket; port 0 picks a free port. Returns the bound port or
  /// throws InvalidRequest.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace infoiter
