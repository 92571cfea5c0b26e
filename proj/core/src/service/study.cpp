#include "natalia/service/study.hpp"

#include <cstdio>
#include <ctime>
#include <sstream>

#include "natalia/common/error.hpp"
#include "natalia/keyframes/json.hpp"

using nlohmann::json;

namespace natalia::service {

std::string format_time(TimePoint t) {
  const auto ms = t.time_since_epoch().count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto frac = static_cast<int>(ms % 1000);
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

TimePoint parse_time(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  int consumed = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &tm.tm_year, &tm.tm_mon,
                  &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &ms, &consumed) != 7 ||
      static_cast<std::size_t>(consumed) != s.size()) {
    throw Error(ErrorCode::SchemaViolation, "bad timestamp '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const auto secs = timegm(&tm);
  return TimePoint(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + ms));
}

std::string_view to_string(Trajectory t) noexcept {
  switch (t) {
    case Trajectory::Vertical: return "VERTICAL";
    case Trajectory::Horizontal: return "HORIZONTAL";
    case Trajectory::Diagonal1: return "DIAGONAL_1";
    case Trajectory::Diagonal2: return "DIAGONAL_2";
  }
  return "?";
}

std::optional<Trajectory> parse_trajectory(std::string_view text) noexcept {
  for (auto t : {Trajectory::Vertical, Trajectory::Horizontal, Trajectory::Diagonal1,
                 Trajectory::Diagonal2}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::string_view to_string(StudyStatus s) noexcept {
  switch (s) {
    case StudyStatus::Uploaded: return "UPLOADED";
    case StudyStatus::Queued: return "QUEUED";
    case StudyStatus::Processing: return "PROCESSING";
    case StudyStatus::Processed: return "PROCESSED";
    case StudyStatus::Failed: return "FAILED";
    case StudyStatus::Reviewed: return "REVIEWED";
  }
  return "?";
}

std::optional<StudyStatus> parse_status(std::string_view text) noexcept {
  for (auto s : {StudyStatus::Uploaded, StudyStatus::Queued, StudyStatus::Processing,
                 StudyStatus::Processed, StudyStatus::Failed, StudyStatus::Reviewed}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool is_legal_transition(std::optional<StudyStatus> from, StudyStatus to) noexcept {
  using S = StudyStatus;
  if (!from) return to == S::Uploaded;
  switch (*from) {
    case S::Uploaded: return to == S::Queued;
    case S::Queued: return to == S::Processing;
    case S::Processing: return to == S::Processed || to == S::Failed || to == S::Queued;
    case S::Processed: return to == S::Reviewed;
    case S::Failed: return to == S::Queued;
    case S::Reviewed: return false;
  }
  return false;
}

std::string_view to_string(Role r) noexcept {
  return r == Role::Operator ? "operator" : "specialist";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "operator") return Role::Operator;
  if (text == "specialist") return Role::Specialist;
  return std::nullopt;
}

std::string_view to_string(DeliveryState s) noexcept {
  switch (s) {
    case DeliveryState::Pending: return "PENDING";
    case DeliveryState::Sent: return "SENT";
    case DeliveryState::Failed: return "FAILED";
  }
  return "?";
}

std::optional<DeliveryState> parse_delivery_state(std::string_view text) noexcept {
  for (auto s : {DeliveryState::Pending, DeliveryState::Sent, DeliveryState::Failed}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void ReviewReport::validate() const {
  if (reviewer_id.empty()) throw Error(ErrorCode::SchemaViolation, "review needs a reviewer_id");
  for (std::size_t i = 0; i < kPlaneCount; ++i) {
    const auto name = std::string(to_string(kPlaneLabels[i]));
    if (!verdicts[i]) throw Error(ErrorCode::SchemaViolation, "missing verdict for " + name);
    const auto& v = *verdicts[i];
    if (v.confirmed && v.count == 0) {
      throw Error(ErrorCode::SchemaViolation, "CONFIRMED verdict for " + name + " needs count >= 1");
    }
    if (!v.confirmed && v.count != 0) {
      throw Error(ErrorCode::SchemaViolation, "NOT_PRESENT verdict for " + name + " has a count");
    }
  }
}

void Study::validate() const {
  const bool wants_result = status == StudyStatus::Processed || status == StudyStatus::Reviewed;
  if (result.has_value() != wants_result) {
    throw Error(ErrorCode::SchemaViolation, "study " + id + ": result presence does not match " +
                                                std::string(to_string(status)));
  }
  if (review.has_value() != (status == StudyStatus::Reviewed)) {
    throw Error(ErrorCode::SchemaViolation, "study " + id + ": review presence does not match " +
                                                std::string(to_string(status)));
  }
  if (error.has_value() != (status == StudyStatus::Failed)) {
    throw Error(ErrorCode::SchemaViolation, "study " + id + ": error presence does not match " +
                                                std::string(to_string(status)));
  }
  if (lease.has_value() != (status == StudyStatus::Processing)) {
    throw Error(ErrorCode::SchemaViolation, "study " + id + ": lease presence does not match " +
                                                std::string(to_string(status)));
  }
  if (review) review->validate();
}

namespace {

template <class E, class F>
E parse_enum(const json& j, F parse, const char* what) {
  const auto text = j.get<std::string>();
  if (auto v = parse(text)) return *v;
  throw Error(ErrorCode::SchemaViolation, std::string("unknown ") + what + " '" + text + "'");
}

json opt_time(const std::optional<TimePoint>& t) {
  return t ? json(format_time(*t)) : json(nullptr);
}

std::optional<TimePoint> get_opt_time(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return parse_time(j.at(key).get<std::string>());
}

json error_json(const std::optional<StudyError>& e) {
  if (!e) return nullptr;
  return json{{"code", e->code}, {"message", e->message}};
}

std::optional<StudyError> get_error(const json& j) {
  if (!j.contains("error") || j.at("error").is_null()) return std::nullopt;
  return StudyError{j.at("error").at("code").get<std::string>(),
                    j.at("error").at("message").get<std::string>()};
}

}  // namespace

void to_json(json& j, const User& u) {
  j = json{{"id", u.id}, {"role", to_string(u.role)}, {"email", u.email}};
}

void from_json(const json& j, User& u) {
  u.id = j.at("id").get<std::string>();
  u.role = parse_enum<Role>(j.at("role"), parse_role, "role");
  u.email = j.value("email", std::string());
}

void to_json(json& j, const ReviewReport& r) {
  json verdicts = json::object();
  for (std::size_t i = 0; i < kPlaneCount; ++i) {
    if (!r.verdicts[i]) continue;
    const auto& v = *r.verdicts[i];
    verdicts[std::string(to_string(kPlaneLabels[i]))] =
        v.confirmed ? json{{"verdict", "CONFIRMED"}, {"count", v.count}}
                    : json{{"verdict", "NOT_PRESENT"}};
  }
  j = json{{"reviewer_id", r.reviewer_id},
           {"verdicts", verdicts},
           {"feedback", r.feedback},
           {"reviewed_at", opt_time(r.reviewed_at)}};
}

void from_json(const json& j, ReviewReport& r) {
  r = ReviewReport{};
  r.reviewer_id = j.value("reviewer_id", std::string());
  r.feedback = j.value("feedback", std::string());
  r.reviewed_at = get_opt_time(j, "reviewed_at");
  const auto& verdicts = j.at("verdicts");
  if (!verdicts.is_object()) throw Error(ErrorCode::SchemaViolation, "verdicts must be an object");
  for (const auto& [key, value] : verdicts.items()) {
    const auto label = parse_label(key);
    if (!label || *label == PlaneLabel::NoPlane) {
      throw Error(ErrorCode::SchemaViolation, "verdict for unknown plane '" + key + "'");
    }
    PlaneVerdict v;
    const auto kind = value.at("verdict").get<std::string>();
    if (kind == "CONFIRMED") {
      v.confirmed = true;
      v.count = value.at("count").get<std::size_t>();
    } else if (kind == "NOT_PRESENT") {
      if (value.contains("count") && !value.at("count").is_null() &&
          value.at("count").get<std::size_t>() != 0) {
        throw Error(ErrorCode::SchemaViolation, "NOT_PRESENT verdict for " + key + " has a count");
      }
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown verdict '" + kind + "'");
    }
    r.verdicts[index_of(*label)] = v;
  }
}

void to_json(json& j, const Study& s) {
  j = json{{"schema", kStudySchema},
           {"id", s.id},
           {"operator_id", s.operator_id},
           {"trajectory", to_string(s.trajectory)},
           {"video_ref", s.video_ref},
           {"video_bytes", s.video_bytes},
           {"status", to_string(s.status)},
           {"result", s.result ? json(*s.result) : json(nullptr)},
           {"review", s.review ? json(*s.review) : json(nullptr)},
           {"error", error_json(s.error)},
           {"lease", s.lease ? json{{"worker_id", s.lease->worker_id},
                                    {"expires_at", format_time(s.lease->expires_at)}}
                             : json(nullptr)},
           {"attempts", s.attempts},
           {"revision", s.revision},
           {"created_at", format_time(s.created_at)},
           {"updated_at", format_time(s.updated_at)}};
}

void from_json(const json& j, Study& s) {
  if (j.value("schema", std::string()) != kStudySchema) {
    throw Error(ErrorCode::SchemaViolation, "not a study document");
  }
  s = Study{};
  s.id = j.at("id").get<std::string>();
  s.operator_id = j.at("operator_id").get<std::string>();
  s.trajectory = parse_enum<Trajectory>(j.at("trajectory"), parse_trajectory, "trajectory");
  s.video_ref = j.at("video_ref").get<std::string>();
  s.video_bytes = j.value("video_bytes", std::uint64_t{0});
  s.status = parse_enum<StudyStatus>(j.at("status"), parse_status, "status");
  if (!j.at("result").is_null()) s.result = keyframes::parse_study_result(j.at("result"));
  if (!j.at("review").is_null()) s.review = j.at("review").get<ReviewReport>();
  s.error = get_error(j);
  if (j.contains("lease") && !j.at("lease").is_null()) {
    s.lease = Lease{j.at("lease").at("worker_id").get<std::string>(),
                    parse_time(j.at("lease").at("expires_at").get<std::string>())};
  }
  s.attempts = j.value("attempts", std::uint64_t{0});
  s.revision = j.value("revision", std::uint64_t{0});
  s.created_at = parse_time(j.at("created_at").get<std::string>());
  s.updated_at = parse_time(j.at("updated_at").get<std::string>());
}

void to_json(json& j, const Notification& n) {
  j = json{{"schema", kNotificationSchema},
           {"id", n.id},
           {"recipient", n.recipient},
           {"study_id", n.study_id},
           {"body", n.body},
           {"delivery_state", to_string(n.delivery_state)},
           {"attempts", n.attempts},
           {"next_attempt_at", opt_time(n.next_attempt_at)},
           {"last_error", n.last_error ? json(*n.last_error) : json(nullptr)},
           {"created_at", format_time(n.created_at)},
           {"sent_at", opt_time(n.sent_at)}};
}

void from_json(const json& j, Notification& n) {
  n = Notification{};
  n.id = j.at("id").get<std::string>();
  n.recipient = j.at("recipient").get<std::string>();
  n.study_id = j.at("study_id").get<std::string>();
  n.body = j.at("body").get<std::string>();
  n.delivery_state =
      parse_enum<DeliveryState>(j.at("delivery_state"), parse_delivery_state, "delivery state");
  n.attempts = j.value("attempts", std::uint32_t{0});
  n.next_attempt_at = get_opt_time(j, "next_attempt_at");
  if (j.contains("last_error") && !j.at("last_error").is_null()) {
    n.last_error = j.at("last_error").get<std::string>();
  }
  n.created_at = parse_time(j.at("created_at").get<std::string>());
  n.sent_at = get_opt_time(j, "sent_at");
}

void to_json(json& j, const StatusEvent& e) {
  j = json{{"schema", kEventSchema},
           {"study_id", e.study_id},
           {"seq", e.seq},
           {"from", e.from ? json(to_string(*e.from)) : json(nullptr)},
           {"to", to_string(e.to)},
           {"actor", e.actor},
           {"at", format_time(e.at)},
           {"error", error_json(e.error)}};
}

void from_json(const json& j, StatusEvent& e) {
  e = StatusEvent{};
  e.study_id = j.at("study_id").get<std::string>();
  e.seq = j.at("seq").get<std::uint64_t>();
  if (!j.at("from").is_null()) {
    e.from = parse_enum<StudyStatus>(j.at("from"), parse_status, "status");
  }
  e.to = parse_enum<StudyStatus>(j.at("to"), parse_status, "status");
  e.actor = j.at("actor").get<std::string>();
  e.at = parse_time(j.at("at").get<std::string>());
  e.error = get_error(j);
}

std::string render_feedback(const Study& study, const ReviewReport& review) {
  std::ostringstream os;
  os << "Study " << study.id << " (" << to_string(study.trajectory) << " sweep)"
     << " was reviewed by " << review.reviewer_id << ".\n\n";
  os << "Plane verdicts:\n";
  for (std::size_t i = 0; i < kPlaneCount; ++i) {
    char line[64];
    const auto name = std::string(to_string(kPlaneLabels[i]));
    const auto& v = review.verdicts[i];
    if (v && v->confirmed) {
      std::snprintf(line, sizeof line, "  %-4s CONFIRMED (%zu)\n", name.c_str(), v->count);
    } else {
      std::snprintf(line, sizeof line, "  %-4s NOT_PRESENT\n", name.c_str());
    }
    os << line;
  }
  os << "\nFeedback:\n" << review.feedback << "\n";
  return os.str();
}

}  // namespace natalia::service
