#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "natalia/service/auth.hpp"
#include "natalia/service/http_api.hpp"
#include "natalia/service/notifications.hpp"
#include "natalia/service/runtime.hpp"
#include "natalia/service/store.hpp"
#include "natalia/service/study_service.hpp"

namespace natalia::service {

/// Settings for `natalia serve`, read from NATALIA_* variables:
///
///   NATALIA_BIND              host:port (default 127.0.0.1:8080; port 0 = any)
///   NATALIA_STORAGE_DIR       root for blobs, documents and outbox (default ./natalia-data)
///   NATALIA_DOCSTORE          file | file:<dir> | memory (default file)
///   NATALIA_MODEL             backend descriptor (default mock)
///   NATALIA_WORKERS           worker threads (default 2)
///   NATALIA_CREDENTIALS       credential JSON file (required)
///   NATALIA_MAX_UPLOAD_BYTES  default 536870912
///   NATALIA_LEASE_SECONDS     processing lease (default 600)
///   NATALIA_JANITOR_SECONDS   lease sweep interval (default 30)
///   NATALIA_SMTP_URL          smtp[s]://host:port; absent selects the file outbox
///   NATALIA_SMTP_FROM, NATALIA_SMTP_USER, NATALIA_SMTP_PASSWORD
///   NATALIA_OUTBOX_DIR        default <storage>/outbox
struct DeploymentConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path storage_dir = "natalia-data";
  std::string docstore = "file";
  std::string model = "mock";
  std::size_t workers = 2;
  std::filesystem::path credentials;
  std::uint64_t max_upload_bytes = 512ull << 20;
  std::chrono::seconds lease{600};
  std::chrono::seconds janitor_interval{30};
  std::chrono::milliseconds dispatch_interval{1000};
  std::chrono::milliseconds worker_poll{500};
  std::optional<SmtpSettings> smtp;
  std::filesystem::path outbox_dir;  // empty: <storage_dir>/outbox
  RetryPolicy retry;

  /// Unknown NATALIA_* keys are errors. Throws Error{InvalidArgument}.
  static DeploymentConfig from_variables(const std::map<std::string, std::string>& vars);
};

/// NATALIA_* entries of the process environment.
std::map<std::string, std::string> environment_variables();

/// KEY=VALUE lines; '#' comments and blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// The whole service: stores, study service, workers, janitor, notification
/// dispatcher and the HTTP API.
class Deployment {
 public:
  explicit Deployment(DeploymentConfig config);
  ~Deployment();

  /// Binds, loads backends and starts every thread. Returns the bound port.
  int start();
  void stop();

  int port() const noexcept { return port_; }
  StudyService& service() noexcept { return *service_; }
  const DeploymentConfig& config() const noexcept { return config_; }

 private:
  DeploymentConfig config_;
  std::unique_ptr<DocumentStore> docs_;
  std::unique_ptr<BlobStore> blobs_;
  std::unique_ptr<StudyService> service_;
  std::unique_ptr<Authenticator> auth_;
  std::unique_ptr<NotificationSender> sender_;
  std::unique_ptr<NotificationDispatcher> dispatcher_;
  std::unique_ptr<WorkerPool> workers_;
  std::unique_ptr<PeriodicTask> janitor_;
  std::unique_ptr<PeriodicTask> dispatch_loop_;
  std::unique_ptr<HttpApi> api_;
  int port_ = -1;
};

}  // namespace natalia::service
