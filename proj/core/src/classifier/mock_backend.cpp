#include "natalia/classifier/mock_backend.hpp"

#include <algorithm>
#include <cmath>

namespace natalia::classifier {
namespace marker {
namespace {

double block_mean(const media::GrayFrame& frame, int x0) {
  double sum = 0.0;
  for (int y = 0; y < kBlock; ++y) {
    for (int x = x0; x < x0 + kBlock; ++x) sum += frame.at(x, y);
  }
  return sum / (kBlock * kBlock);
}

void fill_block(media::GrayFrame& frame, int x0, std::uint8_t value) {
  for (int y = 0; y < kBlock; ++y) {
    for (int x = x0; x < x0 + kBlock; ++x) frame.set(x, y, value);
  }
}

}  // namespace

std::uint8_t confidence_intensity(double confidence) noexcept {
  return static_cast<std::uint8_t>(
      std::lround(std::clamp(confidence, 0.0, 1.0) * 255.0));
}

void stamp(media::GrayFrame& frame, PlaneLabel label, double confidence) {
  fill_block(frame, 0, label_intensity(label));
  fill_block(frame, kConfidenceX, confidence_intensity(confidence));
}

void clear(media::GrayFrame& frame) { fill_block(frame, 0, kNoMarker); }

std::optional<std::pair<PlaneLabel, double>> read(const media::GrayFrame& frame) {
  const double level = block_mean(frame, 0);
  const long k = std::lround((level - 20.0) / 40.0);
  if (k < 0 || k >= static_cast<long>(kLabelCount)) return std::nullopt;
  if (std::abs(level - (40.0 * k + 20.0)) > kLabelTolerance) return std::nullopt;
  const double c = std::clamp(block_mean(frame, kConfidenceX) / 255.0, 0.0, 1.0);
  return std::pair{label_at(static_cast<std::size_t>(k)), c};
}

}  // namespace marker

MockBackend::MockBackend(media::Size input_size) : input_size_(input_size) {
  if (input_size.width < 2 * marker::kBlock || input_size.height < marker::kBlock) {
    throw Error(ErrorCode::InvalidArgument, "mock input must be at least 32x16");
  }
  if (input_size != media::Size{224, 224}) {
    name_ = "mock:" + std::to_string(input_size.width) + "x" +
            std::to_string(input_size.height);
  }
}

Prediction MockBackend::classify(const media::GrayFrame& frame) {
  require_input_size(frame);
  ProbabilityVector probs{};
  if (const auto mark = marker::read(frame)) {
    const auto [label, c] = *mark;
    const double rest = (1.0 - c) / static_cast<double>(kLabelCount - 1);
    probs.fill(rest);
    probs[index_of(label)] = c;
  } else {
    probs[index_of(PlaneLabel::NoPlane)] = 1.0;
  }
  return Prediction::from_probs(frame.index(), probs);
}

}  // namespace natalia::classifier
