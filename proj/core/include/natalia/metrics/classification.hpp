#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "natalia/common/labels.hpp"

namespace natalia::metrics {

using LabelPair = std::pair<PlaneLabel, PlaneLabel>;  // (true, predicted)

/// Rows are the true label, columns the prediction, canonical order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kLabelCount>, kLabelCount> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;
  std::uint64_t at(PlaneLabel truth, PlaneLabel predicted) const noexcept {
    return counts[index_of(truth)][index_of(predicted)];
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const LabelPair> pairs);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;    // row sum
  std::uint64_t predicted = 0;  // column sum
};

// All of the following throw Error{EmptyMatrix} when total() == 0.
// A 0/0 precision, recall or F1 is taken as 0.

double accuracy(const ConfusionMatrix& cm);
std::array<ClassScores, kLabelCount> per_class(const ConfusionMatrix& cm);

/// Unweighted mean F1 over the labels that occur in the matrix (non-zero
/// support or non-zero predictions). Labels absent from both axes carry no
/// evidence and are left out, so a diagonal matrix scores exactly 1.
double macro_f1(const ConfusionMatrix& cm);

/// Support-weighted mean F1.
double weighted_f1(const ConfusionMatrix& cm);

nlohmann::json classification_report_json(const ConfusionMatrix& cm);
std::string classification_report_text(const ConfusionMatrix& cm);

/// CSV "true,pred" with canonical label names (header optional).
/// Throws Error{SchemaViolation} naming the line.
std::vector<LabelPair> read_pairs_csv(const std::filesystem::path& path);

}  // namespace natalia::metrics
