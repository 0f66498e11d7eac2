// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wtbs/service.hpp"

#include <memory>
#include <string>

namespace wtbs {

/// Serves PlannerService::handle over HTTP/1.1.
class HttpServer {
public:
  explicit HttpServer(PlannerService& service);
  ~HttpServer();

  /// Binds without serving; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool serve();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace wtbs
