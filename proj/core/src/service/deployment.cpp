#include "natalia/service/deployment.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>

#include "natalia/common/error.hpp"

extern char** environ;

namespace natalia::service {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidArgument, key + ": '" + value + "' is not a number");
  }
  return out;
}

}  // namespace

DeploymentConfig DeploymentConfig::from_variables(const std::map<std::string, std::string>& vars) {
  DeploymentConfig c;
  std::optional<std::string> smtp_url, smtp_from, smtp_user, smtp_password;
  for (const auto& [key, value] : vars) {
    if (key == "NATALIA_BIND") {
      const auto colon = value.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw Error(ErrorCode::InvalidArgument, "NATALIA_BIND must be host:port");
      }
      c.host = value.substr(0, colon);
      c.port = parse_number<int>(key, value.substr(colon + 1));
      if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::InvalidArgument, "NATALIA_BIND: bad port");
    } else if (key == "NATALIA_STORAGE_DIR") {
      c.storage_dir = value;
    } else if (key == "NATALIA_DOCSTORE") {
      if (value != "file" && value != "memory" && !value.starts_with("file:")) {
        throw Error(ErrorCode::InvalidArgument, "NATALIA_DOCSTORE must be file, file:<dir> or memory");
      }
      c.docstore = value;
    } else if (key == "NATALIA_MODEL") {
      c.model = value;
    } else if (key == "NATALIA_WORKERS") {
      c.workers = parse_number<std::size_t>(key, value);
      if (c.workers == 0) throw Error(ErrorCode::InvalidArgument, "NATALIA_WORKERS must be >= 1");
    } else if (key == "NATALIA_CREDENTIALS") {
      c.credentials = value;
    } else if (key == "NATALIA_MAX_UPLOAD_BYTES") {
      c.max_upload_bytes = parse_number<std::uint64_t>(key, value);
      if (c.max_upload_bytes == 0) throw Error(ErrorCode::InvalidArgument, "NATALIA_MAX_UPLOAD_BYTES must be > 0");
    } else if (key == "NATALIA_LEASE_SECONDS") {
      c.lease = std::chrono::seconds(parse_number<std::int64_t>(key, value));
      if (c.lease.count() <= 0) throw Error(ErrorCode::InvalidArgument, "NATALIA_LEASE_SECONDS must be > 0");
    } else if (key == "NATALIA_JANITOR_SECONDS") {
      c.janitor_interval = std::chrono::seconds(parse_number<std::int64_t>(key, value));
      if (c.janitor_interval.count() <= 0) {
        throw Error(ErrorCode::InvalidArgument, "NATALIA_JANITOR_SECONDS must be > 0");
      }
    } else if (key == "NATALIA_SMTP_URL") {
      smtp_url = value;
    } else if (key == "NATALIA_SMTP_FROM") {
      smtp_from = value;
    } else if (key == "NATALIA_SMTP_USER") {
      smtp_user = value;
    } else if (key == "NATALIA_SMTP_PASSWORD") {
      smtp_password = value;
    } else if (key == "NATALIA_OUTBOX_DIR") {
      c.outbox_dir = value;
    } else if (key.starts_with("NATALIA_")) {
      throw Error(ErrorCode::InvalidArgument, "unknown setting " + key);
    }
  }
  if (smtp_url && !smtp_url->empty()) {
    c.smtp = SmtpSettings{*smtp_url, smtp_from.value_or(""), smtp_user.value_or(""),
                          smtp_password.value_or("")};
  }
  return c;
}

std::map<std::string, std::string> environment_variables() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view entry(*e);
    if (!entry.starts_with("NATALIA_")) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + " line " + std::to_string(number) + ": expected KEY=VALUE");
    }
    auto key = line.substr(first, eq - first);
    auto value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    out[key] = value;
  }
  return out;
}

Deployment::Deployment(DeploymentConfig config) : config_(std::move(config)) {
  if (config_.credentials.empty()) {
    throw Error(ErrorCode::InvalidArgument, "NATALIA_CREDENTIALS is required");
  }
  auth_ = std::make_unique<Authenticator>(Authenticator::from_file(config_.credentials));

  blobs_ = std::make_unique<FileBlobStore>(config_.storage_dir / "blobs");
  if (config_.docstore == "memory") {
    docs_ = std::make_unique<MemoryDocumentStore>();
  } else if (config_.docstore.starts_with("file:")) {
    docs_ = std::make_unique<FileDocumentStore>(config_.docstore.substr(5));
  } else {
    docs_ = std::make_unique<FileDocumentStore>(config_.storage_dir / "documents");
  }

  ServiceConfig sc;
  sc.max_upload_bytes = config_.max_upload_bytes;
  sc.lease = config_.lease;
  service_ = std::make_unique<StudyService>(*docs_, *blobs_, sc);
  auth_->register_users(*service_);

  if (config_.smtp) {
    sender_ = std::make_unique<SmtpSender>(*config_.smtp);
  } else {
    const auto outbox = config_.outbox_dir.empty() ? config_.storage_dir / "outbox" : config_.outbox_dir;
    sender_ = std::make_unique<FileOutboxSender>(outbox);
  }
  dispatcher_ = std::make_unique<NotificationDispatcher>(*docs_, *sender_, config_.retry);

  const std::string model = config_.model;
  workers_ = std::make_unique<WorkerPool>(
      *service_, [model] { return classifier::load_backend(model); }, config_.workers,
      config_.worker_poll);
  janitor_ = std::make_unique<PeriodicTask>(
      "janitor",
      [this] {
        for (const auto& id : service_->requeue_expired()) {
          spdlog::warn("lease expired, requeued {}", id);
          workers_->notify();
        }
      },
      std::chrono::duration_cast<std::chrono::milliseconds>(config_.janitor_interval));
  dispatch_loop_ = std::make_unique<PeriodicTask>(
      "dispatcher", [this] { dispatcher_->dispatch_once(); }, config_.dispatch_interval);

  ApiOptions options;
  options.worker_count = [this] { return workers_->size(); };
  options.on_upload = [this] { workers_->notify(); };
  api_ = std::make_unique<HttpApi>(*service_, *auth_, options);
}

Deployment::~Deployment() { stop(); }

int Deployment::start() {
  port_ = api_->bind(config_.host, config_.port);
  workers_->start();
  janitor_->start();
  dispatch_loop_->start();
  api_->start();
  spdlog::info("serving on {}:{} with {} worker(s), model {}", config_.host, port_,
               config_.workers, config_.model);
  return port_;
}

void Deployment::stop() {
  if (api_) api_->stop();
  if (dispatch_loop_) dispatch_loop_->stop();
  if (janitor_) janitor_->stop();
  if (workers_) workers_->stop();
}

}  // namespace natalia::service
