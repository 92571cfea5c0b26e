#include "natalia/service/study_service.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <random>
#include <set>

#include "natalia/common/error.hpp"
#include "natalia/media/codec.hpp"
#include "natalia/media/decode.hpp"

using nlohmann::json;

namespace natalia::service {

std::string video_key(const std::string& study_id) { return "videos/" + study_id; }

std::string keyframe_key(const std::string& study_id, std::size_t frame_index) {
  return "keyframes/" + study_id + "/" + std::to_string(frame_index) + ".png";
}

std::string event_id(const std::string& study_id, std::uint64_t seq) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(seq));
  return study_id + "." + buf;
}

std::string notification_id(const std::string& study_id) { return "nt-" + study_id; }

namespace {

TimePoint system_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now());
}

bool newer_first(const Study& a, const Study& b) {
  if (a.created_at != b.created_at) return a.created_at > b.created_at;
  return a.id < b.id;
}

}  // namespace

StudyService::StudyService(DocumentStore& docs, BlobStore& blobs, ServiceConfig config, Now now)
    : docs_(docs), blobs_(blobs), config_(std::move(config)), now_(std::move(now)) {
  config_.selection.validate();
  if (config_.batch == 0) throw Error(ErrorCode::InvalidArgument, "batch must be >= 1");
  if (config_.lease.count() <= 0) throw Error(ErrorCode::InvalidArgument, "lease must be > 0");
  if (!now_) now_ = system_now;
}

TimePoint StudyService::now() const { return now_(); }

std::string StudyService::new_id() {
  static std::mutex mutex;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[24];
  std::snprintf(buf, sizeof buf, "st-%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

void StudyService::register_user(const User& user) {
  if (!is_valid_name(user.id)) throw Error(ErrorCode::InvalidArgument, "invalid user id '" + user.id + "'");
  for (;;) {
    const auto current = docs_.get(kUsers, user.id);
    if (docs_.commit(Write{kUsers, user.id, current ? current->version : 0, json(user)})) return;
  }
}

std::optional<User> StudyService::find_user(const std::string& id) const {
  if (!is_valid_name(id)) return std::nullopt;
  const auto doc = docs_.get(kUsers, id);
  if (!doc) return std::nullopt;
  return doc->body.get<User>();
}

std::optional<StudyService::Loaded> StudyService::load(const std::string& id) const {
  if (!is_valid_name(id)) return std::nullopt;
  const auto doc = docs_.get(kStudies, id);
  if (!doc) return std::nullopt;
  return Loaded{doc->body.get<Study>(), doc->version};
}

std::optional<Study> StudyService::find_study(const std::string& id) const {
  if (auto l = load(id)) return l->study;
  return std::nullopt;
}

bool StudyService::transition(const Loaded& current, Study next, const std::string& actor,
                              std::vector<Write> extra) {
  if (!is_legal_transition(current.study.status, next.status)) {
    throw Error(ErrorCode::InvalidState, "illegal transition " +
                                             std::string(to_string(current.study.status)) + " -> " +
                                             std::string(to_string(next.status)));
  }
  next.revision = current.study.revision + 1;
  next.updated_at = now();
  next.validate();
  StatusEvent ev{next.id, next.revision, current.study.status, next.status, actor,
                 next.updated_at, next.error};
  std::vector<Write> writes;
  writes.push_back(Write{kStudies, next.id, current.version, json(next)});
  writes.push_back(Write{kEvents, event_id(next.id, ev.seq), 0, json(ev)});
  for (auto& w : extra) writes.push_back(std::move(w));
  return docs_.commit(writes);
}

Study StudyService::create_study(const std::string& operator_id, Trajectory trajectory,
                                 std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw Error(ErrorCode::EmptyPayload, "video payload is empty");
  if (payload.size() > config_.max_upload_bytes) {
    throw Error(ErrorCode::PayloadTooLarge,
                "video payload of " + std::to_string(payload.size()) + " bytes exceeds the " +
                    std::to_string(config_.max_upload_bytes) + " byte cap");
  }
  const auto user = find_user(operator_id);
  if (!user || user->role != Role::Operator) {
    throw Error(ErrorCode::UnknownOperator, "unknown operator '" + operator_id + "'");
  }

  std::string id;
  do {
    id = new_id();
  } while (docs_.get(kStudies, id) || blobs_.exists(video_key(id)));

  const auto key = video_key(id);
  blobs_.put(key, payload);

  const auto t = now();
  Study s;
  s.id = id;
  s.operator_id = operator_id;
  s.trajectory = trajectory;
  s.video_ref = key;
  s.video_bytes = payload.size();
  s.status = StudyStatus::Queued;
  s.revision = 2;
  s.created_at = t;
  s.updated_at = t;

  const StatusEvent uploaded{id, 1, std::nullopt, StudyStatus::Uploaded, operator_id, t, {}};
  const StatusEvent queued{id, 2, StudyStatus::Uploaded, StudyStatus::Queued, operator_id, t, {}};
  const std::vector<Write> writes = {
      Write{kStudies, id, 0, json(s)},
      Write{kEvents, event_id(id, 1), 0, json(uploaded)},
      Write{kEvents, event_id(id, 2), 0, json(queued)},
  };
  try {
    if (!docs_.commit(writes)) {
      throw Error(ErrorCode::StorageFailure, "study id collision for " + id);
    }
  } catch (...) {
    blobs_.remove(key);
    throw;
  }
  return s;
}

std::optional<Study> StudyService::claim_next(const std::string& worker_id) {
  std::vector<Loaded> queued;
  for (const auto& doc : docs_.list(kStudies)) {
    auto s = doc.body.get<Study>();
    if (s.status == StudyStatus::Queued) queued.push_back(Loaded{std::move(s), doc.version});
  }
  std::sort(queued.begin(), queued.end(), [](const Loaded& a, const Loaded& b) {
    if (a.study.created_at != b.study.created_at) return a.study.created_at < b.study.created_at;
    return a.study.id < b.study.id;
  });
  for (const auto& candidate : queued) {
    Study next = candidate.study;
    next.status = StudyStatus::Processing;
    next.lease = Lease{worker_id, now() + config_.lease};
    next.attempts += 1;
    if (transition(candidate, next, worker_id)) return load(next.id).value().study;
  }
  return std::nullopt;
}

std::optional<Study> StudyService::process_claimed(const Study& claimed,
                                                   const std::string& worker_id,
                                                   classifier::ClassifierBackend& backend) {
  if (config_.observer.on_begin) config_.observer.on_begin(claimed.id, worker_id);

  std::optional<keyframes::StudyResult> result;
  std::optional<StudyError> failure;
  try {
    const auto bytes = blobs_.get(claimed.video_ref);
    if (!bytes) throw Error(ErrorCode::StorageFailure, "video blob " + claimed.video_ref + " is missing");
    const auto video = media::decode_video(*bytes, claimed.id);
    auto out = keyframes::process_sweep_with_frames(video, backend, config_.selection, config_.batch);
    for (const auto& kf : out.result.keyframes) {
      blobs_.put(keyframe_key(claimed.id, kf.frame_index),
                 media::encode_png(out.frames[kf.frame_index]));
    }
    result = std::move(out.result);
  } catch (const Error& e) {
    failure = StudyError{std::string(to_string(e.code())), e.what()};
  } catch (const std::exception& e) {
    failure = StudyError{std::string(to_string(ErrorCode::BackendFailure)), e.what()};
  }

  if (config_.observer.on_end) config_.observer.on_end(claimed.id, worker_id);

  const auto current = load(claimed.id);
  if (!current || current->study.status != StudyStatus::Processing || !current->study.lease ||
      current->study.lease->worker_id != worker_id ||
      current->study.attempts != claimed.attempts) {
    return std::nullopt;
  }
  Study next = current->study;
  next.lease.reset();
  if (result) {
    next.status = StudyStatus::Processed;
    next.result = std::move(result);
  } else {
    next.status = StudyStatus::Failed;
    next.error = std::move(failure);
  }
  if (!transition(*current, next, worker_id)) return std::nullopt;
  return load(claimed.id).value().study;
}

bool StudyService::run_once(const std::string& worker_id, classifier::ClassifierBackend& backend) {
  const auto claimed = claim_next(worker_id);
  if (!claimed) return false;
  process_claimed(*claimed, worker_id, backend);
  return true;
}

Study StudyService::submit_review(const std::string& study_id, const Principal& reviewer,
                                  ReviewReport report) {
  if (reviewer.role != Role::Specialist) {
    throw Error(ErrorCode::Forbidden, "only specialists may submit reviews");
  }
  report.reviewer_id = reviewer.user_id;
  report.reviewed_at = now();
  report.validate();
  for (;;) {
    const auto current = load(study_id);
    if (!current) throw Error(ErrorCode::NotFound, "no study '" + study_id + "'");
    const auto& s = current->study;
    if (s.status == StudyStatus::Reviewed) {
      throw Error(ErrorCode::AlreadyReviewed, "study " + study_id + " is already reviewed");
    }
    if (s.status != StudyStatus::Processed) {
      throw Error(ErrorCode::InvalidState, "study " + study_id + " is " +
                                               std::string(to_string(s.status)) +
                                               "; only PROCESSED studies can be reviewed");
    }
    if (docs_.get(kNotifications, notification_id(study_id))) {
      throw Error(ErrorCode::AlreadyReviewed, "study " + study_id + " already has a notification");
    }
    Study next = s;
    next.status = StudyStatus::Reviewed;
    next.review = report;

    const auto op = find_user(s.operator_id);
    Notification n;
    n.id = notification_id(study_id);
    n.recipient = op && !op->email.empty() ? op->email : s.operator_id;
    n.study_id = study_id;
    n.body = render_feedback(next, report);
    n.created_at = *report.reviewed_at;
    n.next_attempt_at = n.created_at;

    std::vector<Write> extra;
    extra.push_back(Write{kNotifications, n.id, 0, json(n)});
    if (transition(*current, next, reviewer.user_id, std::move(extra))) {
      return load(study_id).value().study;
    }
  }
}

Study StudyService::retry(const std::string& study_id, const std::string& actor) {
  for (;;) {
    const auto current = load(study_id);
    if (!current) throw Error(ErrorCode::NotFound, "no study '" + study_id + "'");
    if (current->study.status != StudyStatus::Failed) {
      throw Error(ErrorCode::InvalidState, "study " + study_id + " is " +
                                               std::string(to_string(current->study.status)) +
                                               "; only FAILED studies can be retried");
    }
    Study next = current->study;
    next.status = StudyStatus::Queued;
    next.error.reset();
    if (transition(*current, next, actor)) return load(study_id).value().study;
  }
}

std::vector<std::string> StudyService::requeue_expired() {
  std::vector<std::string> out;
  const auto t = now();
  for (const auto& doc : docs_.list(kStudies)) {
    auto s = doc.body.get<Study>();
    if (s.status != StudyStatus::Processing || !s.lease || s.lease->expires_at > t) continue;
    Study next = s;
    next.status = StudyStatus::Queued;
    next.lease.reset();
    if (transition(Loaded{s, doc.version}, next, "janitor")) out.push_back(s.id);
  }
  return out;
}

void StudyService::check_access(const Study& s, const Principal& who) const {
  if (who.role == Role::Specialist) return;
  if (s.operator_id != who.user_id) {
    throw Error(ErrorCode::Forbidden, "study " + s.id + " belongs to another operator");
  }
}

Study StudyService::get_study(const std::string& id, const Principal& who) const {
  auto s = find_study(id);
  if (!s) throw Error(ErrorCode::NotFound, "no study '" + id + "'");
  check_access(*s, who);
  return *s;
}

std::vector<Study> StudyService::all_studies() const {
  std::vector<Study> out;
  for (const auto& doc : docs_.list(kStudies)) out.push_back(doc.body.get<Study>());
  std::sort(out.begin(), out.end(), newer_first);
  return out;
}

std::vector<Study> StudyService::list_studies(const StudyFilter& filter,
                                              const Principal& who) const {
  auto operator_id = filter.operator_id;
  if (who.role == Role::Operator) {
    if (operator_id && *operator_id != who.user_id) {
      throw Error(ErrorCode::Forbidden, "operators can only list their own studies");
    }
    operator_id = who.user_id;
  }
  std::vector<Study> out;
  for (auto& s : all_studies()) {
    if (filter.status && s.status != *filter.status) continue;
    if (filter.pending_review && s.status != StudyStatus::Processed) continue;
    if (operator_id && s.operator_id != *operator_id) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::uint8_t> StudyService::download_video(const std::string& id,
                                                       const Principal& who) const {
  const auto s = get_study(id, who);
  auto bytes = blobs_.get(s.video_ref);
  if (!bytes) throw Error(ErrorCode::StorageFailure, "video blob " + s.video_ref + " is missing");
  return std::move(*bytes);
}

std::vector<std::uint8_t> StudyService::keyframe_image(const std::string& id,
                                                       std::size_t frame_index,
                                                       const Principal& who) const {
  const auto s = get_study(id, who);
  const bool selected =
      s.result && std::any_of(s.result->keyframes.begin(), s.result->keyframes.end(),
                              [&](const keyframes::KeyFrame& k) { return k.frame_index == frame_index; });
  if (!selected) {
    throw Error(ErrorCode::NotFound,
                "frame " + std::to_string(frame_index) + " is not a key frame of study " + id);
  }
  auto bytes = blobs_.get(keyframe_key(id, frame_index));
  if (!bytes) throw Error(ErrorCode::StorageFailure, "key-frame image missing for study " + id);
  return std::move(*bytes);
}

std::size_t StudyService::queue_depth() const {
  std::size_t n = 0;
  for (const auto& doc : docs_.list(kStudies)) {
    if (doc.body.at("status").get<std::string>() == to_string(StudyStatus::Queued)) ++n;
  }
  return n;
}

std::vector<StatusEvent> StudyService::events(const std::string& study_id) const {
  std::vector<StatusEvent> out;
  const auto prefix = study_id + ".";
  for (const auto& doc : docs_.list(kEvents)) {
    if (doc.id.starts_with(prefix)) out.push_back(doc.body.get<StatusEvent>());
  }
  return out;
}

std::vector<StatusEvent> StudyService::all_events() const {
  std::vector<StatusEvent> out;
  for (const auto& doc : docs_.list(kEvents)) out.push_back(doc.body.get<StatusEvent>());
  return out;
}

std::vector<Notification> StudyService::notifications() const {
  std::vector<Notification> out;
  for (const auto& doc : docs_.list(kNotifications)) out.push_back(doc.body.get<Notification>());
  return out;
}

AuditReport StudyService::audit() const {
  std::set<std::string> referenced;
  for (const auto& s : all_studies()) {
    referenced.insert(s.video_ref);
    if (s.result) {
      for (const auto& k : s.result->keyframes) referenced.insert(keyframe_key(s.id, k.frame_index));
    }
  }
  AuditReport report;
  std::set<std::string> present;
  for (auto& key : blobs_.keys()) present.insert(std::move(key));
  for (const auto& key : referenced) {
    if (!present.contains(key)) report.missing_blobs.push_back(key);
  }
  for (const auto& key : present) {
    if (!referenced.contains(key)) report.orphan_blobs.push_back(key);
  }
  return report;
}

}  // namespace natalia::service
