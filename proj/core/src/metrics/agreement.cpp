#include "natalia/metrics/agreement.hpp"

#include <cstdio>
#include <sstream>

#include "natalia/common/csv.hpp"
#include "natalia/common/error.hpp"

namespace natalia::metrics {

std::string_view to_string(Presence p) noexcept {
  switch (p) {
    case Presence::BothPresent: return "both_present";
    case Presence::BothAbsent: return "both_absent";
    case Presence::Mismatch: return "mismatch";
  }
  return "?";
}

AgreementReport agreement_report(std::span<const AgreementRow> rows) {
  AgreementReport report;
  report.rows.assign(rows.begin(), rows.end());
  for (const auto& row : rows) {
    RowAgreement a;
    a.study_id = row.study_id;
    for (std::size_t k = 0; k < kPlaneCount; ++k) {
      const bool sys = row.system[k] > 0;
      const bool spec = row.specialist[k] > 0;
      a.presence[k] = sys && spec   ? Presence::BothPresent
                      : !sys && !spec ? Presence::BothAbsent
                                      : Presence::Mismatch;
      a.delta[k] = static_cast<std::int64_t>(row.system[k]) -
                   static_cast<std::int64_t>(row.specialist[k]);
      ++report.total_cells;
      if (a.presence[k] != Presence::Mismatch) ++report.agreeing_cells;
    }
    report.agreement.push_back(std::move(a));
  }
  if (report.total_cells > 0) {
    report.agreement_rate = static_cast<double>(report.agreeing_cells) /
                            static_cast<double>(report.total_cells);
  }
  return report;
}

nlohmann::json agreement_report_json(const AgreementReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.agreement.size(); ++i) {
    const auto& a = report.agreement[i];
    const auto& r = report.rows[i];
    nlohmann::json planes = nlohmann::json::object();
    for (PlaneLabel label : kPlaneLabels) {
      const auto k = index_of(label);
      planes[std::string(natalia::to_string(label))] = {
          {"system", r.system[k]},
          {"specialist", r.specialist[k]},
          {"presence", to_string(a.presence[k])},
          {"delta", a.delta[k]}};
    }
    rows.push_back({{"study_id", a.study_id}, {"planes", planes}});
  }
  nlohmann::json rate = nullptr;
  if (report.agreement_rate) rate = *report.agreement_rate;
  return {{"rows", rows},
          {"agreeing_cells", report.agreeing_cells},
          {"total_cells", report.total_cells},
          {"presence_agreement_rate", rate}};
}

std::string agreement_report_text(const AgreementReport& report) {
  std::ostringstream os;
  char buf[64];
  auto cell = [&](const char* fmt, auto v) {
    std::snprintf(buf, sizeof buf, fmt, v);
    os << buf;
  };
  os << "Study       | System                    || Specialists               || Delta (system - specialist)\n";
  os << "            |";
  for (int g = 0; g < 3; ++g) {
    for (PlaneLabel label : kPlaneLabels) cell("%5s", std::string(natalia::to_string(label)).c_str());
    os << (g < 2 ? " ||" : "\n");
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    const auto& a = report.agreement[i];
    cell("%-12s|", r.study_id.substr(0, 12).c_str());
    for (auto v : r.system) cell("%5llu", static_cast<unsigned long long>(v));
    os << " ||";
    for (auto v : r.specialist) cell("%5llu", static_cast<unsigned long long>(v));
    os << " ||";
    for (std::size_t k = 0; k < kPlaneCount; ++k) {
      std::string d = "0";
      if (a.delta[k] != 0) {
        std::snprintf(buf, sizeof buf, "%+lld", static_cast<long long>(a.delta[k]));
        d = buf;
      }
      if (a.presence[k] == Presence::Mismatch) d += "*";
      cell("%5s", d.c_str());
    }
    os << "\n";
  }
  if (report.agreement_rate) {
    std::snprintf(buf, sizeof buf, "%.4f", *report.agreement_rate);
    os << "\npresence agreement: " << report.agreeing_cells << "/" << report.total_cells
       << " = " << buf << "   (* = presence mismatch)\n";
  } else {
    os << "\npresence agreement: n/a (no rows)\n";
  }
  return os.str();
}

std::vector<AgreementRow> read_agreement_csv(const std::filesystem::path& path) {
  std::vector<AgreementRow> rows;
  for (const auto& csv : read_csv(path, "study_id")) {
    const std::string where = path.filename().string() + " line " + std::to_string(csv.line);
    if (csv.fields.size() != 1 + 2 * kPlaneCount) {
      throw Error(ErrorCode::SchemaViolation,
                  where + ": expected study_id plus 5 system and 5 specialist counts");
    }
    AgreementRow row;
    row.study_id = csv.fields[0];
    for (std::size_t k = 0; k < 2 * kPlaneCount; ++k) {
      const auto& text = csv.fields[1 + k];
      std::uint64_t v = 0;
      try {
        std::size_t used = 0;
        const long long parsed = std::stoll(text, &used);
        if (used != text.size() || parsed < 0) throw std::invalid_argument("");
        v = static_cast<std::uint64_t>(parsed);
      } catch (const std::exception&) {
        throw Error(ErrorCode::SchemaViolation, where + ": bad count '" + text + "'");
      }
      (k < kPlaneCount ? row.system[k] : row.specialist[k - kPlaneCount]) = v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace natalia::metrics
