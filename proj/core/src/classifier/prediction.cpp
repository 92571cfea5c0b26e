#include "natalia/classifier/prediction.hpp"

#include <algorithm>
#include <cmath>

namespace natalia::classifier {

Prediction Prediction::from_probs(std::size_t frame_index,
                                  const ProbabilityVector& probs) {
  Prediction p;
  p.frame_index = frame_index;
  p.probs = probs;
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  p.argmax = label_at(best);
  p.confidence = probs[best];
  return p;
}

ProbabilityVector softmax(const std::array<double, kLabelCount>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  ProbabilityVector out{};
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace natalia::classifier
