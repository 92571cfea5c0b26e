#include <gtest/gtest.h>

#include "natalia/common/error.hpp"
#include "natalia/service/study.hpp"

using nlohmann::json;

namespace natalia::service {
namespace {

using S = StudyStatus;

TimePoint at(std::int64_t ms) { return TimePoint(std::chrono::milliseconds(ms)); }

ReviewReport full_review() {
  ReviewReport r;
  r.reviewer_id = "sp1";
  r.verdicts = {PlaneVerdict{true, 2}, PlaneVerdict{false, 0}, PlaneVerdict{true, 1},
                PlaneVerdict{false, 0}, PlaneVerdict{false, 0}};
  r.feedback = "Good sweep; repeat the femur.";
  r.reviewed_at = at(1'700'000'000'123);
  return r;
}

TEST(Time, FormatAndParse) {
  EXPECT_EQ(format_time(at(0)), "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(format_time(at(1'792'053'000'125)), "2026-10-15T08:30:00.125Z");
  for (std::int64_t ms : {0LL, 1LL, 999LL, 1'792'053'000'125LL, 4'102'444'799'999LL}) {
    EXPECT_EQ(parse_time(format_time(at(ms))), at(ms));
  }
  EXPECT_THROW(parse_time("2026-10-15 08:30:00"), Error);
  EXPECT_THROW(parse_time("2026-10-15T08:30:00.125Zjunk"), Error);
}

TEST(Transitions, LegalSet) {
  const std::vector<std::pair<std::optional<S>, S>> legal{
      {std::nullopt, S::Uploaded}, {S::Uploaded, S::Queued},     {S::Queued, S::Processing},
      {S::Processing, S::Processed}, {S::Processing, S::Failed}, {S::Processed, S::Reviewed},
      {S::Failed, S::Queued},      {S::Processing, S::Queued}};
  const std::vector<S> all{S::Uploaded, S::Queued, S::Processing, S::Processed, S::Failed, S::Reviewed};
  std::size_t count = 0;
  for (std::optional<S> from : {std::optional<S>{}, std::optional<S>{S::Uploaded},
                                std::optional<S>{S::Queued}, std::optional<S>{S::Processing},
                                std::optional<S>{S::Processed}, std::optional<S>{S::Failed},
                                std::optional<S>{S::Reviewed}}) {
    for (S to : all) {
      const bool want = std::find(legal.begin(), legal.end(), std::pair{from, to}) != legal.end();
      EXPECT_EQ(is_legal_transition(from, to), want);
      count += want;
    }
  }
  EXPECT_EQ(count, legal.size());
}

TEST(Enums, RoundTrip) {
  for (auto t : {Trajectory::Vertical, Trajectory::Horizontal, Trajectory::Diagonal1, Trajectory::Diagonal2}) {
    EXPECT_EQ(parse_trajectory(to_string(t)), t);
  }
  for (auto s : {S::Uploaded, S::Queued, S::Processing, S::Processed, S::Failed, S::Reviewed}) {
    EXPECT_EQ(parse_status(to_string(s)), s);
  }
  EXPECT_EQ(parse_role("specialist"), Role::Specialist);
  EXPECT_FALSE(parse_role("admin").has_value());
  EXPECT_FALSE(parse_status("queued").has_value());
  EXPECT_EQ(to_string(Trajectory::Diagonal1), "DIAGONAL_1");
}

TEST(ReviewReport, Validate) {
  auto r = full_review();
  EXPECT_NO_THROW(r.validate());
  r.verdicts[3].reset();
  EXPECT_THROW(r.validate(), Error);
  r = full_review();
  r.verdicts[0] = PlaneVerdict{true, 0};
  EXPECT_THROW(r.validate(), Error);
  r = full_review();
  r.verdicts[1] = PlaneVerdict{false, 3};
  EXPECT_THROW(r.validate(), Error);
  r = full_review();
  r.reviewer_id.clear();
  EXPECT_THROW(r.validate(), Error);
}

TEST(ReviewReport, JsonShape) {
  const json j = full_review();
  EXPECT_EQ(j["verdicts"]["AC"], (json{{"verdict", "CONFIRMED"}, {"count", 2}}));
  EXPECT_EQ(j["verdicts"]["BPD"], (json{{"verdict", "NOT_PRESENT"}}));
  EXPECT_EQ(j["reviewed_at"], "2023-11-14T22:13:20.123Z");
  EXPECT_EQ(j.get<ReviewReport>(), full_review());
}

Study processed_study() {
  Study s;
  s.id = "st-0000000000000001";
  s.operator_id = "op1";
  s.trajectory = Trajectory::Horizontal;
  s.video_ref = "videos/st-0000000000000001";
  s.video_bytes = 1234;
  s.status = S::Processed;
  s.result = keyframes::StudyResult{};
  s.result->backend = "mock";
  s.result->frame_count = 1;
  s.attempts = 1;
  s.revision = 5;
  s.created_at = at(1000);
  s.updated_at = at(2000);
  return s;
}

TEST(Study, ValidateStatusFields) {
  auto s = processed_study();
  EXPECT_NO_THROW(s.validate());
  s.result.reset();
  EXPECT_THROW(s.validate(), Error);

  s = processed_study();
  s.status = S::Processing;
  EXPECT_THROW(s.validate(), Error);  // result without PROCESSED, no lease
  s.result.reset();
  s.lease = Lease{"w", at(5)};
  EXPECT_NO_THROW(s.validate());

  s.status = S::Failed;
  s.lease.reset();
  EXPECT_THROW(s.validate(), Error);
  s.error = StudyError{"CorruptStream", "bad"};
  EXPECT_NO_THROW(s.validate());

  s = processed_study();
  s.status = S::Reviewed;
  EXPECT_THROW(s.validate(), Error);
  s.review = full_review();
  EXPECT_NO_THROW(s.validate());
}

TEST(Study, JsonRoundTrip) {
  auto s = processed_study();
  s.status = S::Reviewed;
  s.review = full_review();
  const json j = s;
  EXPECT_EQ(j["schema"], kStudySchema);
  EXPECT_EQ(j["status"], "REVIEWED");
  EXPECT_EQ(j["trajectory"], "HORIZONTAL");
  EXPECT_EQ(json::parse(j.dump()).get<Study>(), s);

  Study q;
  q.id = "st-2";
  q.operator_id = "op1";
  q.video_ref = "videos/st-2";
  q.status = S::Processing;
  q.lease = Lease{"worker-1", at(99)};
  EXPECT_EQ(json(q).get<Study>(), q);

  auto bad = j;
  bad["status"] = "DONE";
  EXPECT_THROW(bad.get<Study>(), Error);
}

TEST(Notification, JsonRoundTrip) {
  Notification n;
  n.id = "nt-st-1";
  n.recipient = "op@example.org";
  n.study_id = "st-1";
  n.body = "hello";
  n.attempts = 2;
  n.next_attempt_at = at(10);
  n.last_error = "timeout";
  n.created_at = at(1);
  const json j = n;
  EXPECT_EQ(j["delivery_state"], "PENDING");
  EXPECT_EQ(j.get<Notification>(), n);
  n.delivery_state = DeliveryState::Sent;
  n.sent_at = at(20);
  n.next_attempt_at.reset();
  EXPECT_EQ(json(n).get<Notification>(), n);
}

TEST(StatusEvent, JsonRoundTrip) {
  StatusEvent created{"st-1", 1, std::nullopt, S::Uploaded, "op1", at(3), std::nullopt};
  EXPECT_EQ(json(created).get<StatusEvent>(), created);
  EXPECT_TRUE(json(created)["from"].is_null());
  StatusEvent failed{"st-1", 4, S::Processing, S::Failed, "worker-2", at(4), StudyError{"X", "y"}};
  EXPECT_EQ(json(failed).get<StatusEvent>(), failed);
}

TEST(Feedback, RenderedBody) {
  const auto s = processed_study();
  const auto body = render_feedback(s, full_review());
  EXPECT_EQ(body,
            "Study st-0000000000000001 (HORIZONTAL sweep) was reviewed by sp1.\n\n"
            "Plane verdicts:\n"
            "  AC   CONFIRMED (2)\n"
            "  BPD  NOT_PRESENT\n"
            "  HS   CONFIRMED (1)\n"
            "  SS   NOT_PRESENT\n"
            "  FL   NOT_PRESENT\n"
            "\nFeedback:\nGood sweep; repeat the femur.\n");
}

}  // namespace
}  // namespace natalia::service
