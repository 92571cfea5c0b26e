#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "natalia/classifier/backend.hpp"

namespace natalia::classifier {

// Marker protocol shared by the mock backend and the synthetic sweep
// generator. A labelled frame carries two flat 16x16 blocks in its top row:
//
//   label block      x in [0, 16),  y in [0, 16): intensity 40 k + 20
//                    for canonical label index k
//   confidence block x in [16, 32), y in [0, 16): intensity round(c * 255)
//
// A label block whose mean is more than kLabelTolerance away from every
// label level means "no marker".
namespace marker {

inline constexpr int kBlock = 16;
inline constexpr int kConfidenceX = 16;
inline constexpr double kLabelTolerance = 8.0;
/// Background value stamped into the label block of unlabelled frames.
inline constexpr std::uint8_t kNoMarker = 0;

constexpr std::uint8_t label_intensity(PlaneLabel label) noexcept {
  return static_cast<std::uint8_t>(40 * index_of(label) + 20);
}

std::uint8_t confidence_intensity(double confidence) noexcept;

/// Writes both blocks into `frame`.
void stamp(media::GrayFrame& frame, PlaneLabel label, double confidence);

/// Clears the label block so the frame reads as unlabelled.
void clear(media::GrayFrame& frame);

/// Decoded marker, if the label block carries one.
std::optional<std::pair<PlaneLabel, double>> read(const media::GrayFrame& frame);

}  // namespace marker

/// Deterministic stand-in for a trained model. Reads the marker blocks:
/// marked label k with confidence c gets probability c and the remaining
/// 1 - c is spread evenly over the other five labels. Unmarked frames are
/// NO_PLANE with probability 1.
class MockBackend final : public ClassifierBackend {
 public:
  explicit MockBackend(media::Size input_size = {224, 224});

  const std::string& name() const noexcept override { return name_; }
  media::Size input_size() const noexcept override { return input_size_; }
  Prediction classify(const media::GrayFrame& frame) override;

 private:
  std::string name_ = "mock";
  media::Size input_size_;
};

}  // namespace natalia::classifier
