#include "natalia/service/http_api.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>

using nlohmann::json;

namespace natalia::service {

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownOperator:
      return 404;
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::InvalidState:
    case ErrorCode::AlreadyReviewed:
      return 409;
    case ErrorCode::PayloadTooLarge: return 413;
    case ErrorCode::StorageFailure:
    case ErrorCode::BackendFailure:
      return 500;
    default: return 400;
  }
}

struct HttpApi::Impl {
  StudyService& service;
  const Authenticator& auth;
  ApiOptions options;
  httplib::Server server;

  Impl(StudyService& s, const Authenticator& a, ApiOptions o)
      : service(s), auth(a), options(std::move(o)) {}
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message,
                const std::string& study_id) {
  json body = {{"code", to_string(code)}, {"message", message}};
  if (!study_id.empty()) body["study_id"] = study_id;
  send_json(res, http_status_for(code), body);
}

template <class F>
void guarded(httplib::Response& res, const std::string& study_id, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    send_error(res, e.code(), e.what(), study_id);
  } catch (const json::exception& e) {
    send_error(res, ErrorCode::SchemaViolation, e.what(), study_id);
  } catch (const std::exception& e) {
    spdlog::error("request failed: {}", e.what());
    send_error(res, ErrorCode::StorageFailure, e.what(), study_id);
  }
}

Principal require_principal(const Authenticator& auth, const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  if (header.empty()) throw Error(ErrorCode::Unauthorized, "missing bearer token");
  auto p = auth.authenticate(header);
  if (!p) throw Error(ErrorCode::Unauthorized, "invalid bearer token");
  return *p;
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

json study_list(const std::vector<Study>& studies) {
  json out = json::array();
  for (const auto& s : studies) out.push_back(json(s));
  return out;
}

}  // namespace

HttpApi::HttpApi(StudyService& service, const Authenticator& auth, ApiOptions options)
    : impl_(std::make_unique<Impl>(service, auth, std::move(options))) {
  auto& srv = impl_->server;
  Impl* self = impl_.get();

  // Leave room for multipart framing around the video part; the exact cap is
  // enforced on the part itself.
  srv.set_payload_max_length(service.config().max_upload_bytes + (1u << 20));

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    ErrorCode code = ErrorCode::InvalidArgument;
    std::string message = "bad request";
    if (res.status == 413) {
      code = ErrorCode::PayloadTooLarge;
      message = "request body exceeds the upload cap";
    } else if (res.status == 404) {
      code = ErrorCode::NotFound;
      message = "no such route";
    } else if (res.status >= 500) {
      code = ErrorCode::StorageFailure;
      message = "internal error";
    }
    send_json(res, res.status, json{{"code", to_string(code)}, {"message", message}});
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.Get("/api/v1/health", [self](const httplib::Request&, httplib::Response& res) {
    guarded(res, "", [&] {
      const std::size_t workers = self->options.worker_count ? self->options.worker_count() : 0;
      send_json(res, 200,
                json{{"status", "ok"},
                     {"queue_depth", self->service.queue_depth()},
                     {"worker_count", workers}});
    });
  });

  srv.Post("/api/v1/studies", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, "", [&] {
      const auto who = require_principal(self->auth, req);
      if (who.role != Role::Operator) {
        throw Error(ErrorCode::Forbidden, "only operators may upload studies");
      }
      if (!req.is_multipart_form_data()) {
        throw Error(ErrorCode::InvalidArgument, "expected multipart/form-data with metadata and video");
      }
      if (!req.has_file("metadata")) throw Error(ErrorCode::InvalidArgument, "missing 'metadata' part");
      if (!req.has_file("video")) throw Error(ErrorCode::EmptyPayload, "missing 'video' part");
      json meta;
      try {
        meta = json::parse(req.get_file_value("metadata").content);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("metadata is not JSON: ") + e.what());
      }
      if (!meta.is_object() || !meta.contains("trajectory") || !meta["trajectory"].is_string()) {
        throw Error(ErrorCode::SchemaViolation, "metadata.trajectory is required");
      }
      const auto trajectory = parse_trajectory(meta["trajectory"].get<std::string>());
      if (!trajectory) {
        throw Error(ErrorCode::SchemaViolation,
                    "unknown trajectory '" + meta["trajectory"].get<std::string>() + "'");
      }
      if (meta.contains("operator_id") && meta["operator_id"] != who.user_id) {
        throw Error(ErrorCode::Forbidden, "operator_id does not match the bearer token");
      }
      const auto& video = req.get_file_value("video").content;
      const auto study = self->service.create_study(who.user_id, *trajectory, as_bytes(video));
      if (self->options.on_upload) self->options.on_upload();
      res.set_header("Location", "/api/v1/studies/" + study.id);
      send_json(res, 201, json(study));
    });
  });

  srv.Get("/api/v1/studies", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, "", [&] {
      const auto who = require_principal(self->auth, req);
      StudyFilter filter;
      if (req.has_param("status") && !req.get_param_value("status").empty()) {
        const auto text = req.get_param_value("status");
        filter.status = parse_status(text);
        if (!filter.status) throw Error(ErrorCode::InvalidArgument, "unknown status '" + text + "'");
      }
      if (req.has_param("operator") && !req.get_param_value("operator").empty()) {
        filter.operator_id = req.get_param_value("operator");
      }
      if (req.has_param("pending_review")) {
        const auto v = req.get_param_value("pending_review");
        filter.pending_review = v == "true" || v == "1";
      }
      send_json(res, 200, study_list(self->service.list_studies(filter, who)));
    });
  });

  srv.Get(R"(/api/v1/studies/([A-Za-z0-9._-]+))",
          [self](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            guarded(res, id, [&] {
              const auto who = require_principal(self->auth, req);
              send_json(res, 200, json(self->service.get_study(id, who)));
            });
          });

  srv.Get(R"(/api/v1/studies/([A-Za-z0-9._-]+)/video)",
          [self](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            guarded(res, id, [&] {
              const auto who = require_principal(self->auth, req);
              const auto bytes = self->service.download_video(id, who);
              res.status = 200;
              res.set_header("Content-Disposition", "attachment; filename=\"" + id + "\"");
              res.set_content(std::string(bytes.begin(), bytes.end()), "application/octet-stream");
            });
          });

  srv.Get(R"(/api/v1/studies/([A-Za-z0-9._-]+)/keyframes/(\d+)\.png)",
          [self](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            guarded(res, id, [&] {
              const auto who = require_principal(self->auth, req);
              const std::string text = req.matches[2];
              std::size_t index = 0;
              const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
              if (ec != std::errc() || ptr != text.data() + text.size()) {
                throw Error(ErrorCode::NotFound, "bad frame index '" + text + "'");
              }
              const auto png = self->service.keyframe_image(id, index, who);
              res.status = 200;
              res.set_content(std::string(png.begin(), png.end()), "image/png");
            });
          });

  srv.Post(R"(/api/v1/studies/([A-Za-z0-9._-]+)/review)",
           [self](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             guarded(res, id, [&] {
               const auto who = require_principal(self->auth, req);
               json body;
               try {
                 body = json::parse(req.body);
               } catch (const json::exception& e) {
                 throw Error(ErrorCode::SchemaViolation, std::string("review is not JSON: ") + e.what());
               }
               if (!body.is_object()) throw Error(ErrorCode::SchemaViolation, "review must be an object");
               auto report = body.get<ReviewReport>();
               send_json(res, 200, json(self->service.submit_review(id, who, std::move(report))));
             });
           });
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    port_ = srv.bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port_;
}

void HttpApi::start() {
  if (port_ < 0) throw Error(ErrorCode::InvalidState, "bind() before start()");
  if (thread_.joinable()) return;
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpApi::stop() {
  if (!thread_.joinable()) return;
  impl_->server.stop();
  thread_.join();
}

}  // namespace natalia::service
