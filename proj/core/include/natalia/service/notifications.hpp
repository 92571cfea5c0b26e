#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "natalia/service/store.hpp"
#include "natalia/service/study.hpp"

namespace natalia::service {

/// Delivers one notification. Throws on failure; any exception counts as a
/// transient failure to be retried.
class NotificationSender {
 public:
  virtual ~NotificationSender() = default;
  virtual void send(const Notification& n) = 0;
};

/// Writes <dir>/<notification id>.eml. Re-sending overwrites the same file.
class FileOutboxSender : public NotificationSender {
 public:
  explicit FileOutboxSender(std::filesystem::path dir);
  void send(const Notification& n) override;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct SmtpSettings {
  std::string url;  // smtp://host:port or smtps://host:port
  std::string from;
  std::string username;
  std::string password;
  std::chrono::seconds timeout{30};
};

/// Plain-text mail over SMTP (libcurl).
class SmtpSender : public NotificationSender {
 public:
  explicit SmtpSender(SmtpSettings settings);
  void send(const Notification& n) override;

 private:
  SmtpSettings settings_;
};

struct RetryPolicy {
  std::uint32_t max_attempts = 5;
  std::chrono::milliseconds initial_backoff{std::chrono::seconds(2)};
  double multiplier = 2.0;

  /// Delay before attempt `attempts + 1`, given `attempts` failures so far.
  std::chrono::milliseconds backoff_after(std::uint32_t attempts) const;
};

struct DispatchStats {
  std::size_t sent = 0;
  std::size_t retried = 0;
  std::size_t failed = 0;
};

/// Moves PENDING notifications to SENT, or to FAILED once max_attempts
/// deliveries have failed. Each state change is a compare-and-set, so two
/// dispatchers never record the same attempt twice.
class NotificationDispatcher {
 public:
  using Now = std::function<TimePoint()>;

  NotificationDispatcher(DocumentStore& docs, NotificationSender& sender, RetryPolicy policy = {},
                         Now now = nullptr);

  /// One pass over notifications that are due. Idle passes return zeros.
  DispatchStats dispatch_once();

 private:
  DocumentStore& docs_;
  NotificationSender& sender_;
  RetryPolicy policy_;
  Now now_;
};

}  // namespace natalia::service
