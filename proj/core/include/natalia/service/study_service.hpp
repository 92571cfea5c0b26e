#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "natalia/classifier/backend.hpp"
#include "natalia/keyframes/keyframes.hpp"
#include "natalia/service/store.hpp"
#include "natalia/service/study.hpp"

namespace natalia::service {

/// Hooks for instrumentation and tests. Called from worker threads.
struct ProcessingObserver {
  std::function<void(const std::string& study_id, const std::string& worker_id)> on_begin;
  std::function<void(const std::string& study_id, const std::string& worker_id)> on_end;
};

struct ServiceConfig {
  std::uint64_t max_upload_bytes = 512ull << 20;
  std::chrono::milliseconds lease{std::chrono::minutes(10)};
  keyframes::SelectionConfig selection;
  std::size_t batch = 16;
  ProcessingObserver observer;
};

/// Who is asking. Operators see their own studies; specialists see all.
struct Principal {
  std::string user_id;
  Role role = Role::Operator;
};

struct StudyFilter {
  std::optional<StudyStatus> status;
  std::optional<std::string> operator_id;
  bool pending_review = false;  // shorthand for status = PROCESSED
};

struct AuditReport {
  std::vector<std::string> missing_blobs;  // referenced by a study, absent
  std::vector<std::string> orphan_blobs;   // present, unreferenced

  bool consistent() const noexcept { return missing_blobs.empty() && orphan_blobs.empty(); }
};

/// Study lifecycle on top of a document store and a blob store. Thread-safe;
/// every status change is a compare-and-set on the study document and is
/// committed together with its event-log entry.
///
/// Collections: "studies", "events", "notifications", "users".
/// Blob keys: "videos/<id>", "keyframes/<id>/<frame_index>.png".
class StudyService {
 public:
  using Now = std::function<TimePoint()>;

  StudyService(DocumentStore& docs, BlobStore& blobs, ServiceConfig config = {},
               Now now = nullptr);

  const ServiceConfig& config() const noexcept { return config_; }
  TimePoint now() const;

  /// Creates or replaces a user record.
  void register_user(const User& user);
  std::optional<User> find_user(const std::string& id) const;

  /// Stores the payload and persists a QUEUED study (the UPLOADED and QUEUED
  /// events are committed in the same write). All-or-nothing.
  /// Errors: EmptyPayload, PayloadTooLarge, UnknownOperator, StorageFailure.
  Study create_study(const std::string& operator_id, Trajectory trajectory,
                     std::span<const std::uint8_t> payload);

  /// Atomically moves the oldest QUEUED study to PROCESSING under a lease.
  std::optional<Study> claim_next(const std::string& worker_id);

  /// Runs the pipeline on a study claimed by `worker_id` and commits
  /// PROCESSED or FAILED. Returns std::nullopt if the lease was lost in the
  /// meantime (nothing is committed then). Never throws for pipeline errors.
  std::optional<Study> process_claimed(const Study& claimed, const std::string& worker_id,
                                       classifier::ClassifierBackend& backend);

  /// claim_next + process_claimed. Returns false when the queue is empty.
  bool run_once(const std::string& worker_id, classifier::ClassifierBackend& backend);

  /// PROCESSED -> REVIEWED plus one PENDING notification, in one commit.
  /// Errors: NotFound, Forbidden (not a specialist), InvalidState,
  /// AlreadyReviewed, SchemaViolation.
  Study submit_review(const std::string& study_id, const Principal& reviewer,
                      ReviewReport report);

  /// FAILED -> QUEUED. Errors: NotFound, InvalidState.
  Study retry(const std::string& study_id, const std::string& actor = "retry");

  /// Requeues PROCESSING studies whose lease has expired. Returns the ids.
  std::vector<std::string> requeue_expired();

  /// Errors: NotFound, Forbidden.
  Study get_study(const std::string& id, const Principal& who) const;
  /// Unscoped read for internal use; std::nullopt if absent.
  std::optional<Study> find_study(const std::string& id) const;

  /// Ordered by created_at descending, then id ascending. Operators only
  /// ever see their own studies.
  std::vector<Study> list_studies(const StudyFilter& filter, const Principal& who) const;
  std::vector<Study> all_studies() const;

  std::vector<std::uint8_t> download_video(const std::string& id, const Principal& who) const;

  /// 8-bit grayscale PNG of a selected key frame. NotFound unless the frame
  /// index is one of the study's key frames.
  std::vector<std::uint8_t> keyframe_image(const std::string& id, std::size_t frame_index,
                                           const Principal& who) const;

  std::size_t queue_depth() const;

  std::vector<StatusEvent> events(const std::string& study_id) const;
  std::vector<StatusEvent> all_events() const;
  std::vector<Notification> notifications() const;

  AuditReport audit() const;

  DocumentStore& documents() noexcept { return docs_; }
  BlobStore& blobs() noexcept { return blobs_; }

 private:
  struct Loaded {
    Study study;
    std::uint64_t version;
  };

  std::optional<Loaded> load(const std::string& id) const;
  /// CAS of `next` over `version`, with an event from `prev_status`.
  bool transition(const Loaded& current, Study next, const std::string& actor,
                  std::vector<Write> extra = {});
  void check_access(const Study& s, const Principal& who) const;
  std::string new_id();

  DocumentStore& docs_;
  BlobStore& blobs_;
  ServiceConfig config_;
  Now now_;
};

inline constexpr const char* kStudies = "studies";
inline constexpr const char* kEvents = "events";
inline constexpr const char* kNotifications = "notifications";
inline constexpr const char* kUsers = "users";

std::string video_key(const std::string& study_id);
std::string keyframe_key(const std::string& study_id, std::size_t frame_index);
std::string event_id(const std::string& study_id, std::uint64_t seq);
std::string notification_id(const std::string& study_id);

}  // namespace natalia::service
