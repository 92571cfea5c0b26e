#include "natalia/dataset/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "natalia/common/csv.hpp"
#include "natalia/common/error.hpp"

using nlohmann::json;

namespace natalia::dataset {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Seed: return "SEED";
    case Provenance::Propagated: return "PROPAGATED";
    case Provenance::NegativeSampled: return "NEGATIVE_SAMPLED";
  }
  return "?";
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Unassigned: return "UNASSIGNED";
    case Split::Train: return "TRAIN";
    case Split::Val: return "VAL";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
  for (auto p : {Provenance::Seed, Provenance::Propagated, Provenance::NegativeSampled}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  for (auto s : {Split::Unassigned, Split::Train, Split::Val}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

ClassCounts tally(std::span<const ManifestEntry> entries) {
  ClassCounts counts{};
  for (const auto& e : entries) ++counts[index_of(e.label)];
  return counts;
}

void DatasetManifest::recount() { class_counts = tally(entries); }

std::string manifest_to_json(const DatasetManifest& m) {
  json counts = json::object();
  for (PlaneLabel label : kAllLabels) {
    counts[std::string(natalia::to_string(label))] = m.class_counts[index_of(label)];
  }
  json entries = json::array();
  for (const auto& e : m.entries) {
    json j = {{"source_id", e.source_id},
              {"frame_index", e.frame_index},
              {"label", natalia::to_string(e.label)},
              {"provenance", to_string(e.provenance)},
              {"split", to_string(e.split)}};
    if (e.similarity) {
      j["similarity"] = {{"ssim", e.similarity->ssim}, {"ncc", e.similarity->ncc}};
    }
    entries.push_back(std::move(j));
  }
  const json doc = {{"schema", kManifestSchema},
                    {"rng_seed", m.rng_seed},
                    {"thresholds",
                     {{"ssim_min", m.thresholds.ssim_min}, {"ncc_min", m.thresholds.ncc_min}}},
                    {"class_counts", counts},
                    {"entries", entries}};
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void violation(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) violation(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) violation(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) violation(where + "." + key, "expected a string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) violation(where + "." + key, "expected a number");
  return v.get<double>();
}

std::uint64_t unsigned_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_unsigned()) violation(where + "." + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() +
                                                     static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

DatasetManifest manifest_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation,
                "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (string_field(doc, "schema", "manifest") != kManifestSchema) {
    violation("manifest.schema", "expected '" + std::string(kManifestSchema) + "'");
  }
  DatasetManifest m;
  m.rng_seed = unsigned_field(doc, "rng_seed", "manifest");
  const auto& th = field(doc, "thresholds", "manifest");
  m.thresholds.ssim_min = number_field(th, "ssim_min", "manifest.thresholds");
  m.thresholds.ncc_min = number_field(th, "ncc_min", "manifest.thresholds");

  const auto& entries = field(doc, "entries", "manifest");
  if (!entries.is_array()) violation("manifest.entries", "expected an array");
  std::set<FrameRef> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const auto& j = entries[i];
    ManifestEntry e;
    e.source_id = string_field(j, "source_id", where);
    e.frame_index = unsigned_field(j, "frame_index", where);
    const auto label_text = string_field(j, "label", where);
    const auto label = parse_label(label_text);
    if (!label) violation(where + ".label", "unknown label '" + label_text + "'");
    e.label = *label;
    const auto prov_text = string_field(j, "provenance", where);
    const auto prov = parse_provenance(prov_text);
    if (!prov) violation(where + ".provenance", "unknown provenance '" + prov_text + "'");
    e.provenance = *prov;
    const auto split_text = string_field(j, "split", where);
    const auto split = parse_split(split_text);
    if (!split) violation(where + ".split", "unknown split '" + split_text + "'");
    e.split = *split;
    if (j.contains("similarity")) {
      const auto& s = j["similarity"];
      e.similarity = media::SimilarityScore{number_field(s, "ssim", where + ".similarity"),
                                            number_field(s, "ncc", where + ".similarity")};
    }
    if (e.provenance == Provenance::Propagated) {
      if (!e.similarity) violation(where, "PROPAGATED entry without similarity");
      if (!(e.similarity->ssim > m.thresholds.ssim_min &&
            e.similarity->ncc > m.thresholds.ncc_min)) {
        violation(where + ".similarity", "does not exceed the manifest thresholds");
      }
    }
    if (!seen.insert(e.ref()).second) {
      violation(where, "duplicate frame " + e.source_id + "#" + std::to_string(e.frame_index));
    }
    m.entries.push_back(std::move(e));
  }
  m.recount();

  const auto& counts = field(doc, "class_counts", "manifest");
  for (PlaneLabel label : kAllLabels) {
    const std::string name(natalia::to_string(label));
    const auto stored = unsigned_field(counts, name.c_str(), "manifest.class_counts");
    if (stored != m.class_counts[index_of(label)]) {
      violation("manifest.class_counts." + name,
                "stored " + std::to_string(stored) + " but entries tally " +
                    std::to_string(m.class_counts[index_of(label)]));
    }
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest_to_json(manifest);
  if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return manifest_from_json(buffer.str());
}

std::vector<SeedAnnotation> read_seed_csv(const std::filesystem::path& path) {
  std::vector<SeedAnnotation> seeds;
  for (const auto& row : read_csv(path, "source_id")) {
    const std::string where = path.filename().string() + " line " + std::to_string(row.line);
    if (row.fields.size() != 3) violation(where, "expected source_id,frame_index,label");
    SeedAnnotation s;
    s.source_id = row.fields[0];
    try {
      std::size_t used = 0;
      const long long v = std::stoll(row.fields[1], &used);
      if (used != row.fields[1].size() || v < 0) throw std::invalid_argument("");
      s.frame_index = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      violation(where, "bad frame_index '" + row.fields[1] + "'");
    }
    const auto label = parse_label(row.fields[2]);
    if (!label) violation(where, "unknown label '" + row.fields[2] + "'");
    s.label = *label;
    seeds.push_back(std::move(s));
  }
  return seeds;
}

}  // namespace natalia::dataset
