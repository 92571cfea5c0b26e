#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "natalia/common/error.hpp"
#include "natalia/service/auth.hpp"
#include "natalia/service/study_service.hpp"

namespace natalia::service {

/// HTTP status for an error code (e.g. NotFound -> 404, InvalidState -> 409).
int http_status_for(ErrorCode code) noexcept;

struct ApiOptions {
  std::function<std::size_t()> worker_count;  // reported by /health
  std::function<void()> on_upload;            // e.g. wake the worker pool
};

/// REST surface of the study service under /api/v1. Request and response
/// schemas are documented in docs/api.md.
class HttpApi {
 public:
  HttpApi(StudyService& service, const Authenticator& auth, ApiOptions options = {});
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws
  /// Error{InvalidArgument} when binding fails.
  int bind(const std::string& host, int port);
  /// Serves on a background thread until stop().
  void start();
  void stop();

  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace natalia::service
