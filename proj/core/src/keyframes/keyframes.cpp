#include "natalia/keyframes/keyframes.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "natalia/common/error.hpp"
#include "natalia/media/similarity.hpp"

namespace natalia::keyframes {

void SelectionConfig::validate() const {
  if (!(min_confidence > 0.0 && min_confidence < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "min_confidence must be in (0, 1)");
  }
  if (max_per_label < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_per_label must be >= 1");
  }
  if (!(dedup_ssim >= -1.0 && dedup_ssim <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dedup_ssim must be in [-1, 1]");
  }
}

std::vector<Run> group_runs(std::span<const classifier::Prediction> preds,
                            const SelectionConfig& cfg) {
  cfg.validate();
  std::vector<Run> runs;
  for (PlaneLabel label : kPlaneLabels) {
    std::optional<Run> open;
    for (const auto& p : preds) {
      if (p.argmax != label || p.confidence < cfg.min_confidence) continue;
      if (open && p.frame_index - open->end - 1 <= cfg.max_gap) {
        open->end = p.frame_index;
        if (p.confidence > open->peak_confidence) {
          open->peak_index = p.frame_index;
          open->peak_confidence = p.confidence;
        }
        continue;
      }
      if (open) runs.push_back(*open);
      open = Run{label, p.frame_index, p.frame_index, p.frame_index, p.confidence};
    }
    if (open) runs.push_back(*open);
  }
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return a.start != b.start ? a.start < b.start : a.label < b.label;
  });
  return runs;
}

std::vector<KeyFrame> select_keyframes(std::span<const Run> runs,
                                       const media::FrameSequence& frames,
                                       const SelectionConfig& cfg) {
  cfg.validate();
  std::map<PlaneLabel, std::vector<KeyFrame>> candidates;
  for (const auto& run : runs) {
    if (run.peak_index >= frames.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "run peak " + std::to_string(run.peak_index) +
                      " outside sequence of " + std::to_string(frames.size()) +
                      " frames");
    }
    candidates[run.label].push_back(
        {run.peak_index, run.label, run.peak_confidence, run});
  }

  std::vector<KeyFrame> selected;
  for (auto& [label, list] : candidates) {
    std::sort(list.begin(), list.end(), [](const KeyFrame& a, const KeyFrame& b) {
      return a.confidence != b.confidence ? a.confidence > b.confidence
                                          : a.frame_index < b.frame_index;
    });
    std::vector<const KeyFrame*> kept;
    for (const auto& cand : list) {
      if (kept.size() == cfg.max_per_label) break;
      const auto& frame = frames[cand.frame_index];
      const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const KeyFrame* k) {
        return media::ssim(frame, frames[k->frame_index]) > cfg.dedup_ssim;
      });
      if (!duplicate) kept.push_back(&cand);
    }
    for (const auto* k : kept) selected.push_back(*k);
  }
  std::sort(selected.begin(), selected.end(), [](const KeyFrame& a, const KeyFrame& b) {
    return a.frame_index != b.frame_index ? a.frame_index < b.frame_index
                                          : a.label < b.label;
  });
  return selected;
}

PlaneCounts count_by_plane(std::span<const KeyFrame> keyframes) {
  PlaneCounts counts{};
  for (const auto& k : keyframes) {
    if (k.label != PlaneLabel::NoPlane) ++counts[index_of(k.label)];
  }
  return counts;
}

SweepOutput process_sweep_with_frames(const media::FrameSequence& video,
                                      classifier::ClassifierBackend& backend,
                                      const SelectionConfig& cfg,
                                      std::size_t batch) {
  cfg.validate();
  if (video.empty()) throw Error(ErrorCode::EmptyInput, "sweep has no frames");
  SweepOutput out{{}, media::resize_sequence(video, backend.input_size())};
  auto& r = out.result;
  r.backend = backend.name();
  r.frame_count = video.size();
  r.config = cfg;
  r.predictions = classifier::classify_sequence(backend, out.frames, batch);
  const auto runs = group_runs(r.predictions, cfg);
  r.keyframes = select_keyframes(runs, out.frames, cfg);
  r.counts = count_by_plane(r.keyframes);
  return out;
}

StudyResult process_sweep(const media::FrameSequence& video,
                          classifier::ClassifierBackend& backend,
                          const SelectionConfig& cfg, std::size_t batch) {
  return process_sweep_with_frames(video, backend, cfg, batch).result;
}

}  // namespace natalia::keyframes
