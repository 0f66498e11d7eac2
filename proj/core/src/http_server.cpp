// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/http_server.hpp"

#include <httplib.h>

namespace wtbs {

struct HttpServer::Impl {
  PlannerService& service;
  httplib::Server server;

  explicit Impl(PlannerService& s) : service(s) {
    const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest api;
      api.method = req.method;
      api.path = req.path;
      api.body = req.body;
      for (const auto& [k, v] : req.params) api.query.emplace(k, v);
      const auto out = service.handle(api);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    server.Delete(".*", dispatch);
  }
};

HttpServer::HttpServer(PlannerService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host.c_str());
  return impl_->server.bind_to_port(host.c_str(), port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

} // namespace wtbs
