#pragma once

#include <nlohmann/json.hpp>

#include "natalia/keyframes/keyframes.hpp"

// JSON mapping for the study-result document ("natalia-study-result/1").
// Field layout is documented in docs/formats.md.

namespace natalia::classifier {
void to_json(nlohmann::json& j, const Prediction& p);
void from_json(const nlohmann::json& j, Prediction& p);
}  // namespace natalia::classifier

namespace natalia::keyframes {

inline constexpr const char* kStudyResultSchema = "natalia-study-result/1";

void to_json(nlohmann::json& j, const SelectionConfig& c);
void from_json(const nlohmann::json& j, SelectionConfig& c);
void to_json(nlohmann::json& j, const Run& r);
void from_json(const nlohmann::json& j, Run& r);
void to_json(nlohmann::json& j, const KeyFrame& k);
void from_json(const nlohmann::json& j, KeyFrame& k);
void to_json(nlohmann::json& j, const StudyResult& r);
void from_json(const nlohmann::json& j, StudyResult& r);

/// Parses a study-result document; throws Error{SchemaViolation}.
StudyResult parse_study_result(const nlohmann::json& j);

/// Canonical file name for a key-frame image, e.g. "frame_00012_AC.png".
std::string keyframe_filename(const KeyFrame& k);

}  // namespace natalia::keyframes
