#pragma once

#include "natalia/media/frame.hpp"

namespace natalia::media {

struct SimilarityScore {
  double ssim = 0.0;
  double ncc = 0.0;

  friend bool operator==(const SimilarityScore&, const SimilarityScore&) = default;
};

/// Parameters of mean SSIM (Wang et al. 2004 defaults).
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean SSIM over every fully contained Gaussian-weighted window.
/// Throws Error{DimensionMismatch} when sizes differ.
double ssim(const GrayFrame& a, const GrayFrame& b,
            const SsimParams& params = {});

/// Zero-lag normalised cross-correlation of the mean-centred images.
///
/// Two constant, pixel-equal frames correlate to exactly 1. Any other case
/// where a frame has zero variance throws Error{DegenerateVariance}.
/// Throws Error{DimensionMismatch} when sizes differ.
double ncc(const GrayFrame& a, const GrayFrame& b);

SimilarityScore similarity(const GrayFrame& a, const GrayFrame& b);

}  // namespace natalia::media
