#include "infoiter/http_server.hpp"

#include <httplib.h>

namespace infoiter {

struct HttpServer::Impl {
  Api& api;
  httplib::Server server;

  explicit Impl(Api& a) : api(a) {}

  void reply(httplib::Response& res, const ApiResponse& out) {
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    std::string body = req.body;
    if (req.method == "POST" && req.is_multipart_form_data()) {
      if (req.files.empty()) {
        reply(res, {400, error_envelope(ErrorCode::InvalidRequest, "multipart upload has no file part")});
        return;
      }
      body = req.has_file("file") ? req.get_file_value("file").content : req.files.begin()->second.content;
    }
    reply(res, api.dispatch(req.method, req.path, body));
  }
};

HttpServer::HttpServer(Api& api, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(api)) {
  auto& s = impl_->server;
  // Leave headroom over the CSV limit for multipart framing; the Api
  // enforces the limit itself.
  s.set_payload_max_length(api.options().upload_limit + 64 * 1024);
  if (static_dir && !s.set_mount_point("/", static_dir->string())) {
    throw Error(ErrorCode::InvalidRequest, "static directory not found: " + static_dir->string());
  }
  auto h = [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); };
  s.Get(R"(/.*)", h);
  s.Post(R"(/.*)", h);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  if (port == 0) {
    int bound = s.bind_to_any_port(host);
    if (bound > 0) return bound;
  } else if (s.bind_to_port(host, port)) {
    return port;
  }
  throw Error(ErrorCode::InvalidRequest, "cannot bind " + host + ":" + std::to_string(port));
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace infoiter
