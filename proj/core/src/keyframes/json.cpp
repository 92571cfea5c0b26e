#include "natalia/keyframes/json.hpp"

#include <cstdio>

#include "natalia/common/error.hpp"

using nlohmann::json;

namespace natalia {
namespace {

PlaneLabel label_from(const json& j) {
  const auto text = j.get<std::string>();
  if (auto label = parse_label(text)) return *label;
  throw Error(ErrorCode::SchemaViolation, "unknown label '" + text + "'");
}

}  // namespace

namespace classifier {

void to_json(json& j, const Prediction& p) {
  j = json{{"frame_index", p.frame_index},
           {"label", to_string(p.argmax)},
           {"confidence", p.confidence},
           {"probs", p.probs}};
}

void from_json(const json& j, Prediction& p) {
  ProbabilityVector probs{};
  const auto& arr = j.at("probs");
  if (!arr.is_array() || arr.size() != kLabelCount) {
    throw Error(ErrorCode::SchemaViolation, "probs must hold 6 values");
  }
  for (std::size_t i = 0; i < kLabelCount; ++i) probs[i] = arr[i].get<double>();
  p = Prediction::from_probs(j.at("frame_index").get<std::size_t>(), probs);
}

}  // namespace classifier

namespace keyframes {

void to_json(json& j, const SelectionConfig& c) {
  j = json{{"min_confidence", c.min_confidence},
           {"max_gap", c.max_gap},
           {"max_per_label", c.max_per_label},
           {"dedup_ssim", c.dedup_ssim}};
}

void from_json(const json& j, SelectionConfig& c) {
  c.min_confidence = j.at("min_confidence").get<double>();
  c.max_gap = j.at("max_gap").get<std::size_t>();
  c.max_per_label = j.at("max_per_label").get<std::size_t>();
  c.dedup_ssim = j.at("dedup_ssim").get<double>();
}

void to_json(json& j, const Run& r) {
  j = json{{"label", to_string(r.label)},
           {"start", r.start},
           {"end", r.end},
           {"peak_index", r.peak_index},
           {"peak_confidence", r.peak_confidence}};
}

void from_json(const json& j, Run& r) {
  r.label = label_from(j.at("label"));
  r.start = j.at("start").get<std::size_t>();
  r.end = j.at("end").get<std::size_t>();
  r.peak_index = j.at("peak_index").get<std::size_t>();
  r.peak_confidence = j.at("peak_confidence").get<double>();
}

void to_json(json& j, const KeyFrame& k) {
  j = json{{"frame_index", k.frame_index},
           {"label", to_string(k.label)},
           {"confidence", k.confidence},
           {"run", k.run}};
}

void from_json(const json& j, KeyFrame& k) {
  k.frame_index = j.at("frame_index").get<std::size_t>();
  k.label = label_from(j.at("label"));
  k.confidence = j.at("confidence").get<double>();
  k.run = j.at("run").get<Run>();
}

void to_json(json& j, const StudyResult& r) {
  json counts = json::object();
  for (PlaneLabel label : kPlaneLabels) {
    counts[std::string(to_string(label))] = r.counts[index_of(label)];
  }
  j = json{{"schema", kStudyResultSchema},
           {"backend", r.backend},
           {"frame_count", r.frame_count},
           {"config", r.config},
           {"counts", counts},
           {"keyframes", r.keyframes},
           {"predictions", r.predictions}};
}

void from_json(const json& j, StudyResult& r) {
  if (j.value("schema", "") != kStudyResultSchema) {
    throw Error(ErrorCode::SchemaViolation, "study result: unexpected schema");
  }
  r.backend = j.at("backend").get<std::string>();
  r.frame_count = j.at("frame_count").get<std::size_t>();
  r.config = j.at("config").get<SelectionConfig>();
  r.keyframes = j.at("keyframes").get<std::vector<KeyFrame>>();
  r.predictions = j.at("predictions").get<std::vector<classifier::Prediction>>();
  const auto& counts = j.at("counts");
  for (PlaneLabel label : kPlaneLabels) {
    r.counts[index_of(label)] = counts.at(std::string(to_string(label))).get<std::size_t>();
  }
}

StudyResult parse_study_result(const json& j) {
  try {
    return j.get<StudyResult>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("study result: ") + e.what());
  }
}

std::string keyframe_filename(const KeyFrame& k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%05zu_%s.png", k.frame_index,
                std::string(to_string(k.label)).c_str());
  return buf;
}

}  // namespace keyframes
}  // namespace natalia
