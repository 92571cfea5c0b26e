#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "natalia/common/labels.hpp"

namespace natalia::metrics {

using PlaneTally = std::array<std::uint64_t, kPlaneCount>;  // AC BPD HS SS FL

/// Planes found by the system vs. planes confirmed by specialists, per study.
struct AgreementRow {
  std::string study_id;
  PlaneTally system{};
  PlaneTally specialist{};
};

enum class Presence { BothPresent, BothAbsent, Mismatch };

std::string_view to_string(Presence p) noexcept;

struct RowAgreement {
  std::string study_id;
  std::array<Presence, kPlaneCount> presence{};
  std::array<std::int64_t, kPlaneCount> delta{};  // system - specialist
};

struct AgreementReport {
  std::vector<AgreementRow> rows;
  std::vector<RowAgreement> agreement;
  std::size_t agreeing_cells = 0;
  std::size_t total_cells = 0;
  /// agreeing / total over rows x planes; absent when there are no rows.
  std::optional<double> agreement_rate;
};

/// A plane counts as present when its count is > 0.
AgreementReport agreement_report(std::span<const AgreementRow> rows);

nlohmann::json agreement_report_json(const AgreementReport& report);

/// System and specialist columns side by side, then the per-plane deltas.
/// Mismatched presence is flagged with '*'.
std::string agreement_report_text(const AgreementReport& report);

/// CSV header: study_id,system_AC,system_BPD,system_HS,system_SS,system_FL,
/// specialist_AC,specialist_BPD,specialist_HS,specialist_SS,specialist_FL
std::vector<AgreementRow> read_agreement_csv(const std::filesystem::path& path);

}  // namespace natalia::metrics
