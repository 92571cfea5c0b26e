#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "natalia/common/labels.hpp"
#include "natalia/media/similarity.hpp"

namespace natalia::dataset {

enum class Provenance { Seed, Propagated, NegativeSampled };
enum class Split { Unassigned, Train, Val };

std::string_view to_string(Provenance p) noexcept;
std::string_view to_string(Split s) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct FrameRef {
  std::string source_id;
  std::size_t frame_index = 0;

  friend auto operator<=>(const FrameRef&, const FrameRef&) = default;
};

struct SeedAnnotation {
  std::string source_id;
  std::size_t frame_index = 0;
  PlaneLabel label = PlaneLabel::AC;

  friend bool operator==(const SeedAnnotation&, const SeedAnnotation&) = default;
};

struct ManifestEntry {
  std::string source_id;
  std::size_t frame_index = 0;
  PlaneLabel label = PlaneLabel::NoPlane;
  Provenance provenance = Provenance::Seed;
  std::optional<media::SimilarityScore> similarity;  // PROPAGATED only
  Split split = Split::Unassigned;

  FrameRef ref() const { return {source_id, frame_index}; }
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Thresholds {
  double ssim_min = 0.90;
  double ncc_min = 0.90;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

using ClassCounts = std::array<std::size_t, kLabelCount>;

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Thresholds thresholds;
  std::uint64_t rng_seed = 0;
  ClassCounts class_counts{};

  /// Recomputes class_counts from entries.
  void recount();

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

ClassCounts tally(std::span<const ManifestEntry> entries);

inline constexpr const char* kManifestSchema = "natalia-manifest/1";

std::string manifest_to_json(const DatasetManifest& manifest);

/// Throws Error{SchemaViolation} with the line (for syntax errors) or the
/// entry and field (for content errors) in the message.
DatasetManifest manifest_from_json(std::string_view text);

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// CSV with columns source_id,frame_index,label (header optional).
/// Throws Error{SchemaViolation} naming the line.
std::vector<SeedAnnotation> read_seed_csv(const std::filesystem::path& path);

}  // namespace natalia::dataset
