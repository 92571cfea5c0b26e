#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "natalia/common/labels.hpp"
#include "natalia/media/frame.hpp"

namespace natalia::sim {

/// Frames [first, last] (inclusive) carry `label`.
struct LabelSpan {
  PlaneLabel label = PlaneLabel::AC;
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const LabelSpan&, const LabelSpan&) = default;
};

/// Parses "AC@10-14,FL@40-42". Throws Error{InvalidArgument}.
std::vector<LabelSpan> parse_label_spans(std::string_view text);

struct SweepSpec {
  std::size_t frame_count = 100;
  media::Size size{224, 224};
  std::vector<LabelSpan> spans;
  std::uint64_t seed = 1;
  double fps = 10.0;
  // Confidence peaks at the span centre and falls off by `confidence_step`
  // per frame, never below `floor_confidence`.
  double peak_confidence = 0.95;
  double confidence_step = 0.05;
  double floor_confidence = 0.6;
};

struct PlantedSpan {
  LabelSpan span;
  std::size_t peak_index = 0;
  double peak_confidence = 0.0;  // as encoded, a multiple of 1/255
};

struct PlantedFrame {
  std::size_t index = 0;
  PlaneLabel label = PlaneLabel::AC;
  double confidence = 0.0;  // as encoded
};

struct GroundTruth {
  std::size_t frame_count = 0;
  std::vector<PlantedSpan> spans;
  std::vector<PlantedFrame> frames;  // labelled frames only
};

struct SyntheticSweep {
  media::FrameSequence frames;
  GroundTruth truth;
};

/// Builds a sweep with textured, mutually dissimilar backgrounds and marker
/// blocks on the planted frames. Throws Error{InvalidArgument} for spans
/// outside the frame range, overlapping spans, NO_PLANE spans, or a peak
/// confidence that would not win the argmax (<= 1/6).
SyntheticSweep generate_sweep(const SweepSpec& spec);

nlohmann::json to_json(const GroundTruth& truth);

/// frame_%05d.png + meta.json + ground_truth.json.
void write_frame_directory(const SyntheticSweep& sweep,
                           const std::filesystem::path& dir);

/// Smooth random texture; different seeds give unrelated images.
media::GrayFrame textured_frame(std::size_t index, media::Size size,
                                std::uint64_t seed);

}  // namespace natalia::sim
