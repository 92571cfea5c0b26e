#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "natalia/dataset/manifest.hpp"
#include "natalia/media/frame.hpp"

namespace natalia::dataset {

/// Extends each seed to neighbouring frames that resemble the seed frame.
///
/// From each seed, walk forward then backward one frame at a time and take
/// frame n while ssim(seed, n) > ssim_min and ncc(seed, n) > ncc_min,
/// stopping each direction at the first frame that fails. A frame with zero
/// variance fails (logged). Seed frames always keep their own label. When
/// several seeds reach one frame, the higher ncc wins, then the higher ssim,
/// then the lower seed index. Entries are ordered by frame index.
///
/// Errors: IndexOutOfRange for a seed outside the sequence;
/// InvalidArgument for a foreign source_id, thresholds outside (0, 1], or two
/// seeds on one frame with different labels.
std::vector<ManifestEntry> propagate_labels(const media::FrameSequence& seq,
                                            std::span<const SeedAnnotation> seeds,
                                            double ssim_min, double ncc_min);

/// Uniformly picks floor(fraction * n) distinct candidates (after sorting and
/// de-duplicating them) as NO_PLANE / NEGATIVE_SAMPLED entries, ordered by
/// (source_id, frame_index). Throws Error{InvalidArgument} unless
/// fraction is in (0, 1].
std::vector<ManifestEntry> subsample_negatives(std::span<const FrameRef> candidates,
                                               double fraction,
                                               std::uint64_t rng_seed);

/// Stratified split: per label (canonical order), shuffle that label's
/// entries and send the first floor(train_fraction * n) to TRAIN, the rest
/// to VAL. Throws Error{AlreadySplit} if any entry is already assigned and
/// Error{InvalidArgument} unless train_fraction is in (0, 1).
DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction,
                              std::uint64_t rng_seed);

struct BuildOptions {
  Thresholds thresholds;
  double negative_fraction = 0.30;
  double train_fraction = 0.80;
  std::uint64_t seed = 0;
};

/// Propagation over every sequence, negative sampling over every frame not
/// already labelled, then the stratified split.
DatasetManifest build_manifest(std::span<const media::FrameSequence> sequences,
                               std::span<const SeedAnnotation> seeds,
                               const BuildOptions& options);

}  // namespace natalia::dataset
