#include <gtest/gtest.h>

#include <fstream>

#include "natalia/common/error.hpp"
#include "natalia/service/notifications.hpp"
#include "natalia/service/study_service.hpp"
#include "test_support.hpp"

namespace natalia::service {
namespace {

using namespace std::chrono_literals;

class FlakySender : public NotificationSender {
 public:
  explicit FlakySender(int failures) : failures_(failures) {}
  void send(const Notification& n) override {
    ++calls;
    if (failures_ > 0) {
      --failures_;
      throw std::runtime_error("connection refused");
    }
    delivered.push_back(n.id);
  }
  int calls = 0;
  std::vector<std::string> delivered;

 private:
  int failures_;
};

struct Fixture {
  TimePoint t{std::chrono::milliseconds(1792053000000)};
  MemoryDocumentStore docs;

  void add(const std::string& id) {
    Notification n;
    n.id = id;
    n.recipient = "op1@example.org";
    n.study_id = "st-1";
    n.body = "Line one\nLine two\n";
    n.created_at = t;
    n.next_attempt_at = t;
    ASSERT_TRUE(docs.commit(Write{kNotifications, id, 0, nlohmann::json(n)}));
  }
  Notification get(const std::string& id) {
    return docs.get(kNotifications, id)->body.get<Notification>();
  }
};

TEST(RetryPolicy, ExponentialBackoff) {
  RetryPolicy p;
  EXPECT_EQ(p.backoff_after(0), 2000ms);
  EXPECT_EQ(p.backoff_after(1), 2000ms);
  EXPECT_EQ(p.backoff_after(2), 4000ms);
  EXPECT_EQ(p.backoff_after(3), 8000ms);
  p.multiplier = 3.0;
  p.initial_backoff = 100ms;
  EXPECT_EQ(p.backoff_after(4), 2700ms);
}

TEST(Dispatcher, RetriesUntilSent) {
  Fixture f;
  f.add("nt-a");
  FlakySender sender(2);
  NotificationDispatcher d(f.docs, sender, RetryPolicy{}, [&] { return f.t; });

  auto s = d.dispatch_once();
  EXPECT_EQ(s.retried, 1u);
  auto n = f.get("nt-a");
  EXPECT_EQ(n.delivery_state, DeliveryState::Pending);
  EXPECT_EQ(n.attempts, 1u);
  EXPECT_EQ(n.next_attempt_at, f.t + 2s);
  EXPECT_EQ(n.last_error, "connection refused");

  // Not due yet.
  s = d.dispatch_once();
  EXPECT_EQ(s.retried + s.sent + s.failed, 0u);
  EXPECT_EQ(sender.calls, 1);

  f.t += 2s;
  d.dispatch_once();
  n = f.get("nt-a");
  EXPECT_EQ(n.attempts, 2u);
  EXPECT_EQ(n.next_attempt_at, f.t + 4s);

  f.t += 4s;
  s = d.dispatch_once();
  EXPECT_EQ(s.sent, 1u);
  n = f.get("nt-a");
  EXPECT_EQ(n.delivery_state, DeliveryState::Sent);
  EXPECT_EQ(n.attempts, 3u);
  EXPECT_EQ(n.sent_at, f.t);
  EXPECT_FALSE(n.last_error);
  EXPECT_FALSE(n.next_attempt_at);

  f.t += 1h;
  EXPECT_EQ(d.dispatch_once().sent, 0u);
  EXPECT_EQ(sender.delivered, std::vector<std::string>{"nt-a"});
}

TEST(Dispatcher, GivesUpAfterMaxAttempts) {
  Fixture f;
  f.add("nt-b");
  FlakySender sender(100);
  NotificationDispatcher d(f.docs, sender, RetryPolicy{}, [&] { return f.t; });
  std::size_t failed = 0;
  for (int i = 0; i < 10; ++i) {
    failed += d.dispatch_once().failed;
    f.t += 1min;
  }
  EXPECT_EQ(failed, 1u);
  EXPECT_EQ(sender.calls, 5);
  const auto n = f.get("nt-b");
  EXPECT_EQ(n.delivery_state, DeliveryState::Failed);
  EXPECT_EQ(n.attempts, 5u);
  EXPECT_FALSE(n.next_attempt_at);
}

TEST(Dispatcher, RejectsZeroAttempts) {
  MemoryDocumentStore docs;
  FlakySender sender(0);
  RetryPolicy p;
  p.max_attempts = 0;
  EXPECT_THROW(NotificationDispatcher(docs, sender, p), Error);
}

TEST(FileOutbox, WritesOneMessagePerNotification) {
  testing::TempDir dir;
  FileOutboxSender sender(dir / "outbox");
  Notification n;
  n.id = "nt-st-1";
  n.recipient = "op1@example.org";
  n.study_id = "st-1";
  n.body = "Line one\nLine two\n";
  sender.send(n);
  sender.send(n);
  const auto text = testing::read_text(dir / "outbox" / "nt-st-1.eml");
  EXPECT_EQ(text,
            "To: op1@example.org\r\nSubject: Study st-1 reviewed\r\n"
            "X-Natalia-Notification: nt-st-1\r\nContent-Type: text/plain; charset=utf-8\r\n\r\n"
            "Line one\r\nLine two\r\n");
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir / "outbox"),
                          std::filesystem::directory_iterator{}),
            1);
}

TEST(SmtpSender, RejectsBadInput) {
  EXPECT_THROW(SmtpSender(SmtpSettings{}), Error);
  SmtpSender s(SmtpSettings{"smtp://127.0.0.1:1", "", "", "", 2s});
  Notification n;
  n.recipient = "op1";
  EXPECT_THROW(s.send(n), Error);
  n.recipient = "op1@example.org";
  EXPECT_THROW(s.send(n), Error);  // nothing listens on port 1
}

}  // namespace
}  // namespace natalia::service
