#include "natalia/service/notifications.hpp"

#include <curl/curl.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "natalia/common/error.hpp"
#include "natalia/service/study_service.hpp"

using nlohmann::json;

namespace natalia::service {

FileOutboxSender::FileOutboxSender(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create outbox " + dir_.string());
}

namespace {

std::string render_message(const Notification& n, const std::string& from) {
  std::string msg;
  if (!from.empty()) msg += "From: " + from + "\r\n";
  msg += "To: " + n.recipient + "\r\n";
  msg += "Subject: Study " + n.study_id + " reviewed\r\n";
  msg += "X-Natalia-Notification: " + n.id + "\r\n";
  msg += "Content-Type: text/plain; charset=utf-8\r\n\r\n";
  for (char c : n.body) {
    if (c == '\n') msg += "\r\n";
    else msg += c;
  }
  return msg;
}

}  // namespace

void FileOutboxSender::send(const Notification& n) {
  write_file_atomic(dir_ / (n.id + ".eml"), render_message(n, ""));
}

SmtpSender::SmtpSender(SmtpSettings settings) : settings_(std::move(settings)) {
  if (settings_.url.empty()) throw Error(ErrorCode::InvalidArgument, "SMTP url is empty");
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

namespace {

struct Upload {
  const std::string* data;
  std::size_t offset = 0;
};

std::size_t read_payload(char* buf, std::size_t size, std::size_t nmemb, void* user) {
  auto* up = static_cast<Upload*>(user);
  const std::size_t room = size * nmemb;
  const std::size_t left = up->data->size() - up->offset;
  const std::size_t n = std::min(room, left);
  std::memcpy(buf, up->data->data() + up->offset, n);
  up->offset += n;
  return n;
}

}  // namespace

void SmtpSender::send(const Notification& n) {
  if (n.recipient.find('@') == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "recipient '" + n.recipient + "' is not an address");
  }
  const std::string message = render_message(n, settings_.from);
  Upload up{&message};
  CURL* curl = curl_easy_init();
  if (!curl) throw Error(ErrorCode::BackendFailure, "curl_easy_init failed");
  curl_slist* rcpt = curl_slist_append(nullptr, ("<" + n.recipient + ">").c_str());
  curl_easy_setopt(curl, CURLOPT_URL, settings_.url.c_str());
  if (!settings_.from.empty()) {
    curl_easy_setopt(curl, CURLOPT_MAIL_FROM, ("<" + settings_.from + ">").c_str());
  }
  if (!settings_.username.empty()) {
    curl_easy_setopt(curl, CURLOPT_USERNAME, settings_.username.c_str());
    curl_easy_setopt(curl, CURLOPT_PASSWORD, settings_.password.c_str());
  }
  curl_easy_setopt(curl, CURLOPT_MAIL_RCPT, rcpt);
  curl_easy_setopt(curl, CURLOPT_READFUNCTION, read_payload);
  curl_easy_setopt(curl, CURLOPT_READDATA, &up);
  curl_easy_setopt(curl, CURLOPT_UPLOAD, 1L);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, static_cast<long>(settings_.timeout.count()));
  curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
  const CURLcode rc = curl_easy_perform(curl);
  curl_slist_free_all(rcpt);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) {
    throw Error(ErrorCode::BackendFailure, std::string("SMTP delivery failed: ") + curl_easy_strerror(rc));
  }
}

std::chrono::milliseconds RetryPolicy::backoff_after(std::uint32_t attempts) const {
  const double factor = std::pow(multiplier, attempts == 0 ? 0.0 : attempts - 1.0);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(static_cast<double>(initial_backoff.count()) * factor));
}

NotificationDispatcher::NotificationDispatcher(DocumentStore& docs, NotificationSender& sender,
                                               RetryPolicy policy, Now now)
    : docs_(docs), sender_(sender), policy_(policy), now_(std::move(now)) {
  if (policy_.max_attempts == 0) throw Error(ErrorCode::InvalidArgument, "max_attempts must be >= 1");
  if (!now_) {
    now_ = [] { return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now()); };
  }
}

DispatchStats NotificationDispatcher::dispatch_once() {
  DispatchStats stats;
  for (const auto& doc : docs_.list(kNotifications)) {
    auto n = doc.body.get<Notification>();
    if (n.delivery_state != DeliveryState::Pending) continue;
    const auto t = now_();
    if (n.next_attempt_at && *n.next_attempt_at > t) continue;

    // Claim the attempt first so concurrent dispatchers cannot both count it.
    n.attempts += 1;
    n.next_attempt_at = t + policy_.backoff_after(n.attempts);
    if (!docs_.commit(Write{kNotifications, n.id, doc.version, json(n)})) continue;
    const auto version = doc.version + 1;

    try {
      sender_.send(n);
      n.delivery_state = DeliveryState::Sent;
      n.sent_at = now_();
      n.next_attempt_at.reset();
      n.last_error.reset();
      ++stats.sent;
    } catch (const std::exception& e) {
      n.last_error = e.what();
      if (n.attempts >= policy_.max_attempts) {
        n.delivery_state = DeliveryState::Failed;
        n.next_attempt_at.reset();
        ++stats.failed;
      } else {
        ++stats.retried;
      }
    }
    docs_.commit(Write{kNotifications, n.id, version, json(n)});
  }
  return stats;
}

}  // namespace natalia::service
