#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "natalia/classifier/backend.hpp"
#include "natalia/classifier/prediction.hpp"
#include "natalia/media/frame.hpp"

namespace natalia::keyframes {

struct SelectionConfig {
  double min_confidence = 0.5;    // tau, in (0, 1)
  std::size_t max_gap = 2;        // bridged gap length in frames
  std::size_t max_per_label = 12;  // K, >= 1
  double dedup_ssim = 0.90;       // in [-1, 1]

  /// Throws Error{InvalidArgument} naming the offending field.
  void validate() const;

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

/// Temporal span of frames predicted as one plane. start/end are inclusive.
struct Run {
  PlaneLabel label = PlaneLabel::AC;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t peak_index = 0;
  double peak_confidence = 0.0;

  friend bool operator==(const Run&, const Run&) = default;
};

struct KeyFrame {
  std::size_t frame_index = 0;
  PlaneLabel label = PlaneLabel::AC;
  double confidence = 0.0;
  Run run;

  friend bool operator==(const KeyFrame&, const KeyFrame&) = default;
};

using PlaneCounts = std::array<std::size_t, kPlaneCount>;

struct StudyResult {
  std::string backend;
  std::size_t frame_count = 0;
  SelectionConfig config;
  std::vector<classifier::Prediction> predictions;
  std::vector<KeyFrame> keyframes;
  PlaneCounts counts{};  // key frames per plane, AC BPD HS SS FL

  friend bool operator==(const StudyResult&, const StudyResult&) = default;
};

/// Groups qualifying frames (argmax = L != NO_PLANE, confidence >= tau)
/// into runs, independently per label. Consecutive qualifying frames of L
/// separated by at most max_gap other frames (any label or confidence) share
/// a run; bridged frames never become the peak. The peak is the first frame
/// holding the run's maximum confidence. Output is ordered by (start, label).
std::vector<Run> group_runs(std::span<const classifier::Prediction> preds,
                            const SelectionConfig& cfg);

/// Takes each run's peak frame, then per label keeps candidates in
/// descending confidence unless their SSIM against an already kept frame of
/// the same label exceeds dedup_ssim, up to max_per_label. Output is ordered
/// by frame index. Throws Error{IndexOutOfRange} if a peak is not in
/// `frames`.
std::vector<KeyFrame> select_keyframes(std::span<const Run> runs,
                                       const media::FrameSequence& frames,
                                       const SelectionConfig& cfg);

PlaneCounts count_by_plane(std::span<const KeyFrame> keyframes);

/// classify -> group -> select. Frames are resized to the backend's input
/// size first, and dedup runs at that resolution.
/// Throws Error{EmptyInput} for an empty video.
StudyResult process_sweep(const media::FrameSequence& video,
                          classifier::ClassifierBackend& backend,
                          const SelectionConfig& cfg, std::size_t batch = 16);

/// The same pipeline, also returning the resized frames it ran on.
struct SweepOutput {
  StudyResult result;
  media::FrameSequence frames;
};
SweepOutput process_sweep_with_frames(const media::FrameSequence& video,
                                      classifier::ClassifierBackend& backend,
                                      const SelectionConfig& cfg,
                                      std::size_t batch = 16);

}  // namespace natalia::keyframes
