#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace natalia::metrics {

enum class TlxDimension { Mental, Physical, Temporal, Performance, Effort, Frustration };

inline constexpr std::size_t kTlxDimensions = 6;

inline constexpr std::array<TlxDimension, kTlxDimensions> kTlxOrder = {
    TlxDimension::Mental,      TlxDimension::Physical, TlxDimension::Temporal,
    TlxDimension::Performance, TlxDimension::Effort,   TlxDimension::Frustration};

std::string_view to_string(TlxDimension d) noexcept;

/// Raw NASA-TLX questionnaire: six subscales, each 0..100 in steps of 5.
struct TlxResponse {
  std::string participant;
  std::array<double, kTlxDimensions> scores{};

  /// Throws Error{InvalidArgument} naming the participant and subscale.
  void validate() const;
  /// Raw TLX: unweighted mean of the six subscales.
  double raw_tlx() const noexcept;
};

struct Summary {
  double mean = 0.0;
  std::optional<double> sd;             // sample (n - 1), needs n >= 2
  std::optional<double> population_sd;  // n denominator
};

struct TlxSummary {
  std::size_t respondents = 0;
  std::array<Summary, kTlxDimensions> dimensions{};
  std::vector<double> raw_tlx;  // per respondent, input order
  Summary overall;              // over raw_tlx
};

Summary summarize(std::span<const double> values);

/// Throws Error{EmptyInput} for no responses; validates every response.
TlxSummary aggregate_tlx(std::span<const TlxResponse> responses);

nlohmann::json tlx_summary_json(const TlxSummary& summary);

/// "mental (M = 26.25, SD = 12.99)" style lines, one per dimension.
std::string tlx_summary_text(const TlxSummary& summary);

/// CSV header: participant,mental,physical,temporal,performance,effort,frustration
std::vector<TlxResponse> read_tlx_csv(const std::filesystem::path& path);

}  // namespace natalia::metrics
