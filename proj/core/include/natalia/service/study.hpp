#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "natalia/common/labels.hpp"
#include "natalia/keyframes/keyframes.hpp"

namespace natalia::service {

using Clock = std::chrono::system_clock;
using TimePoint = std::chrono::time_point<Clock, std::chrono::milliseconds>;

/// "2026-10-15T08:30:00.125Z". Round-trips through parse_time.
std::string format_time(TimePoint t);
TimePoint parse_time(std::string_view text);

enum class Trajectory { Vertical, Horizontal, Diagonal1, Diagonal2 };

std::string_view to_string(Trajectory t) noexcept;
std::optional<Trajectory> parse_trajectory(std::string_view text) noexcept;

enum class StudyStatus { Uploaded, Queued, Processing, Processed, Failed, Reviewed };

std::string_view to_string(StudyStatus s) noexcept;
std::optional<StudyStatus> parse_status(std::string_view text) noexcept;

/// UPLOADED->QUEUED->PROCESSING->(PROCESSED|FAILED), PROCESSED->REVIEWED,
/// FAILED->QUEUED (retry) and PROCESSING->QUEUED (expired lease).
/// `from` empty means creation, which may only produce UPLOADED.
bool is_legal_transition(std::optional<StudyStatus> from, StudyStatus to) noexcept;

enum class Role { Operator, Specialist };

std::string_view to_string(Role r) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

struct User {
  std::string id;
  Role role = Role::Operator;
  std::string email;

  friend bool operator==(const User&, const User&) = default;
};

struct PlaneVerdict {
  bool confirmed = false;
  std::size_t count = 0;  // >= 1 when confirmed, 0 otherwise

  friend bool operator==(const PlaneVerdict&, const PlaneVerdict&) = default;
};

struct ReviewReport {
  std::string reviewer_id;
  std::array<std::optional<PlaneVerdict>, kPlaneCount> verdicts{};
  std::string feedback;
  std::optional<TimePoint> reviewed_at;

  /// Every plane has exactly one verdict; confirmed counts are >= 1.
  /// Throws Error{SchemaViolation}.
  void validate() const;

  friend bool operator==(const ReviewReport&, const ReviewReport&) = default;
};

struct Lease {
  std::string worker_id;
  TimePoint expires_at;

  friend bool operator==(const Lease&, const Lease&) = default;
};

struct StudyError {
  std::string code;
  std::string message;

  friend bool operator==(const StudyError&, const StudyError&) = default;
};

struct Study {
  std::string id;
  std::string operator_id;
  Trajectory trajectory = Trajectory::Vertical;
  std::string video_ref;
  std::uint64_t video_bytes = 0;
  StudyStatus status = StudyStatus::Uploaded;
  std::optional<keyframes::StudyResult> result;
  std::optional<ReviewReport> review;
  std::optional<StudyError> error;  // present iff FAILED
  std::optional<Lease> lease;       // present iff PROCESSING
  std::uint64_t attempts = 0;       // number of claims so far
  std::uint64_t revision = 0;       // number of status transitions so far
  TimePoint created_at;
  TimePoint updated_at;

  /// Field/status consistency; throws Error{SchemaViolation}.
  void validate() const;

  friend bool operator==(const Study&, const Study&) = default;
};

enum class DeliveryState { Pending, Sent, Failed };

std::string_view to_string(DeliveryState s) noexcept;
std::optional<DeliveryState> parse_delivery_state(std::string_view text) noexcept;

struct Notification {
  std::string id;
  std::string recipient;
  std::string study_id;
  std::string body;
  DeliveryState delivery_state = DeliveryState::Pending;
  std::uint32_t attempts = 0;
  std::optional<TimePoint> next_attempt_at;
  std::optional<std::string> last_error;
  TimePoint created_at;
  std::optional<TimePoint> sent_at;

  friend bool operator==(const Notification&, const Notification&) = default;
};

/// One persisted status transition.
struct StatusEvent {
  std::string study_id;
  std::uint64_t seq = 0;  // 1-based, per study
  std::optional<StudyStatus> from;
  StudyStatus to = StudyStatus::Uploaded;
  std::string actor;
  TimePoint at;
  std::optional<StudyError> error;

  friend bool operator==(const StatusEvent&, const StatusEvent&) = default;
};

inline constexpr const char* kStudySchema = "natalia-study/1";
inline constexpr const char* kNotificationSchema = "natalia-notification/1";
inline constexpr const char* kEventSchema = "natalia-event/1";

void to_json(nlohmann::json& j, const User& u);
void from_json(const nlohmann::json& j, User& u);
void to_json(nlohmann::json& j, const ReviewReport& r);
void from_json(const nlohmann::json& j, ReviewReport& r);
void to_json(nlohmann::json& j, const Study& s);
void from_json(const nlohmann::json& j, Study& s);
void to_json(nlohmann::json& j, const Notification& n);
void from_json(const nlohmann::json& j, Notification& n);
void to_json(nlohmann::json& j, const StatusEvent& e);
void from_json(const nlohmann::json& j, StatusEvent& e);

/// Email body for a review: study id, per-plane verdicts, feedback text.
std::string render_feedback(const Study& study, const ReviewReport& review);

}  // namespace natalia::service
