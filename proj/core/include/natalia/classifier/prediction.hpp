#pragma once

#include <array>
#include <cstddef>

#include "natalia/common/labels.hpp"

namespace natalia::classifier {

using ProbabilityVector = std::array<double, kLabelCount>;

struct Prediction {
  std::size_t frame_index = 0;
  ProbabilityVector probs{};
  PlaneLabel argmax = PlaneLabel::NoPlane;
  double confidence = 0.0;

  /// Fills argmax/confidence from `probs`; ties go to the lowest label.
  static Prediction from_probs(std::size_t frame_index,
                               const ProbabilityVector& probs);

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Numerically stable softmax in double precision.
ProbabilityVector softmax(const std::array<double, kLabelCount>& logits);

}  // namespace natalia::classifier
