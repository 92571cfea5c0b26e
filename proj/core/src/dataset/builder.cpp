#include "natalia/dataset/builder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "natalia/common/error.hpp"
#include "natalia/common/random.hpp"
#include "natalia/media/similarity.hpp"

namespace natalia::dataset {
namespace {

struct Claim {
  PlaneLabel label;
  media::SimilarityScore score;
  std::size_t seed_index;
};

// Higher ncc, then higher ssim, then the earlier seed.
bool stronger(const Claim& a, const Claim& b) {
  if (a.score.ncc != b.score.ncc) return a.score.ncc > b.score.ncc;
  if (a.score.ssim != b.score.ssim) return a.score.ssim > b.score.ssim;
  return a.seed_index < b.seed_index;
}

std::optional<media::SimilarityScore> passes(const media::GrayFrame& seed,
                                             const media::GrayFrame& other,
                                             double ssim_min, double ncc_min) {
  try {
    const auto score = media::similarity(seed, other);
    if (score.ssim > ssim_min && score.ncc > ncc_min) return score;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateVariance) throw;
    spdlog::debug("propagation stops at frame {}: {}", other.index(), e.what());
  }
  return std::nullopt;
}

void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be in (0, 1]");
  }
}

}  // namespace

std::vector<ManifestEntry> propagate_labels(const media::FrameSequence& seq,
                                            std::span<const SeedAnnotation> seeds,
                                            double ssim_min, double ncc_min) {
  check_unit_interval(ssim_min, "ssim_min");
  check_unit_interval(ncc_min, "ncc_min");

  std::map<std::size_t, PlaneLabel> seed_labels;
  for (const auto& s : seeds) {
    if (s.source_id != seq.source_id()) {
      throw Error(ErrorCode::InvalidArgument, "seed for source '" + s.source_id +
                                                  "' given with sequence '" +
                                                  seq.source_id() + "'");
    }
    if (s.frame_index >= seq.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  seq.source_id() + ": seed frame " + std::to_string(s.frame_index) +
                      " outside " + std::to_string(seq.size()) + " frames");
    }
    const auto [it, inserted] = seed_labels.emplace(s.frame_index, s.label);
    if (!inserted && it->second != s.label) {
      throw Error(ErrorCode::InvalidArgument,
                  seq.source_id() + ": conflicting seed labels on frame " +
                      std::to_string(s.frame_index));
    }
  }

  std::map<std::size_t, Claim> claims;
  const auto n = static_cast<std::ptrdiff_t>(seq.size());
  for (const auto& [seed_index, label] : seed_labels) {
    const auto& anchor = seq[seed_index];
    for (const std::ptrdiff_t step : {std::ptrdiff_t{1}, std::ptrdiff_t{-1}}) {
      for (auto i = static_cast<std::ptrdiff_t>(seed_index) + step; i >= 0 && i < n;
           i += step) {
        const auto idx = static_cast<std::size_t>(i);
        const auto score = passes(anchor, seq[idx], ssim_min, ncc_min);
        if (!score) break;
        if (seed_labels.contains(idx)) continue;
        const Claim claim{label, *score, seed_index};
        const auto it = claims.find(idx);
        if (it == claims.end()) {
          claims.emplace(idx, claim);
        } else if (stronger(claim, it->second)) {
          it->second = claim;
        }
      }
    }
  }

  std::vector<ManifestEntry> out;
  out.reserve(seed_labels.size() + claims.size());
  for (const auto& [idx, label] : seed_labels) {
    out.push_back({seq.source_id(), idx, label, Provenance::Seed, std::nullopt,
                   Split::Unassigned});
  }
  for (const auto& [idx, claim] : claims) {
    out.push_back({seq.source_id(), idx, claim.label, Provenance::Propagated,
                   claim.score, Split::Unassigned});
  }
  std::sort(out.begin(), out.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return a.frame_index < b.frame_index;
  });
  return out;
}

std::vector<ManifestEntry> subsample_negatives(std::span<const FrameRef> candidates,
                                               double fraction,
                                               std::uint64_t rng_seed) {
  check_unit_interval(fraction, "negative fraction");
  std::vector<FrameRef> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const std::size_t k = fraction_floor(fraction, pool.size());
  SeededRng rng(rng_seed);
  rng.shuffle(pool);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());

  std::vector<ManifestEntry> out;
  out.reserve(k);
  for (auto& ref : pool) {
    out.push_back({std::move(ref.source_id), ref.frame_index, PlaneLabel::NoPlane,
                   Provenance::NegativeSampled, std::nullopt, Split::Unassigned});
  }
  return out;
}

DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction,
                              std::uint64_t rng_seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must be in (0, 1)");
  }
  for (const auto& e : manifest.entries) {
    if (e.split != Split::Unassigned) {
      throw Error(ErrorCode::AlreadySplit,
                  "entry " + e.source_id + "#" + std::to_string(e.frame_index) +
                      " already assigned to " + std::string(to_string(e.split)));
    }
  }
  SeededRng rng(rng_seed);
  for (PlaneLabel label : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].label == label) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() == 1) {
      spdlog::warn("label {} has a single entry; it goes to VAL and TRAIN gets none",
                   to_string(label));
    }
    rng.shuffle(members);
    const std::size_t train = fraction_floor(train_fraction, members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
      manifest.entries[members[j]].split = j < train ? Split::Train : Split::Val;
    }
  }
  manifest.recount();
  return manifest;
}

DatasetManifest build_manifest(std::span<const media::FrameSequence> sequences,
                               std::span<const SeedAnnotation> seeds,
                               const BuildOptions& options) {
  std::map<std::string, const media::FrameSequence*> by_source;
  for (const auto& seq : sequences) {
    if (!by_source.emplace(seq.source_id(), &seq).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate source id " + seq.source_id());
    }
  }
  std::map<std::string, std::vector<SeedAnnotation>> grouped;
  for (const auto& s : seeds) {
    if (!by_source.contains(s.source_id)) {
      throw Error(ErrorCode::InvalidArgument,
                  "seed references unknown source '" + s.source_id + "'");
    }
    grouped[s.source_id].push_back(s);
  }

  DatasetManifest manifest;
  manifest.thresholds = options.thresholds;
  manifest.rng_seed = options.seed;
  std::set<FrameRef> labelled;
  for (const auto& [source, seq] : by_source) {
    const auto it = grouped.find(source);
    if (it == grouped.end()) continue;
    for (auto& e : propagate_labels(*seq, it->second, options.thresholds.ssim_min,
                                    options.thresholds.ncc_min)) {
      labelled.insert(e.ref());
      manifest.entries.push_back(std::move(e));
    }
  }

  std::vector<FrameRef> negatives;
  for (const auto& [source, seq] : by_source) {
    for (std::size_t i = 0; i < seq->size(); ++i) {
      FrameRef ref{source, i};
      if (!labelled.contains(ref)) negatives.push_back(std::move(ref));
    }
  }
  for (auto& e : subsample_negatives(negatives, options.negative_fraction, options.seed)) {
    manifest.entries.push_back(std::move(e));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.ref() < b.ref(); });
  manifest.recount();
  return split_dataset(std::move(manifest), options.train_fraction, options.seed);
}

}  // namespace natalia::dataset
