#include "natalia/metrics/tlx.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "natalia/common/csv.hpp"
#include "natalia/common/error.hpp"

namespace natalia::metrics {

std::string_view to_string(TlxDimension d) noexcept {
  switch (d) {
    case TlxDimension::Mental: return "mental";
    case TlxDimension::Physical: return "physical";
    case TlxDimension::Temporal: return "temporal";
    case TlxDimension::Performance: return "performance";
    case TlxDimension::Effort: return "effort";
    case TlxDimension::Frustration: return "frustration";
  }
  return "?";
}

void TlxResponse::validate() const {
  for (std::size_t i = 0; i < kTlxDimensions; ++i) {
    const double v = scores[i];
    if (!(v >= 0.0 && v <= 100.0) || std::fmod(v, 5.0) != 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "participant '" + participant + "': " +
                      std::string(to_string(kTlxOrder[i])) +
                      " must be 0..100 in steps of 5");
    }
  }
}

double TlxResponse::raw_tlx() const noexcept {
  double sum = 0.0;
  for (double v : scores) sum += v;
  return sum / static_cast<double>(kTlxDimensions);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to summarize");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  Summary s;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.population_sd = std::sqrt(ss / n);
  if (values.size() >= 2) s.sd = std::sqrt(ss / (n - 1.0));
  return s;
}

TlxSummary aggregate_tlx(std::span<const TlxResponse> responses) {
  if (responses.empty()) throw Error(ErrorCode::EmptyInput, "no TLX responses");
  TlxSummary out;
  out.respondents = responses.size();
  for (const auto& r : responses) {
    r.validate();
    out.raw_tlx.push_back(r.raw_tlx());
  }
  for (std::size_t d = 0; d < kTlxDimensions; ++d) {
    std::vector<double> column;
    column.reserve(responses.size());
    for (const auto& r : responses) column.push_back(r.scores[d]);
    out.dimensions[d] = summarize(column);
  }
  out.overall = summarize(out.raw_tlx);
  return out;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
  nlohmann::json j = {{"mean", s.mean}};
  j["sd"] = s.sd ? nlohmann::json(*s.sd) : nlohmann::json(nullptr);
  j["population_sd"] = s.population_sd ? nlohmann::json(*s.population_sd) : nlohmann::json(nullptr);
  return j;
}

std::string m_sd(const Summary& s) {
  char buf[96];
  if (s.sd) {
    std::snprintf(buf, sizeof buf, "(M = %.2f, SD = %.2f)", s.mean, *s.sd);
  } else {
    std::snprintf(buf, sizeof buf, "(M = %.2f)", s.mean);
  }
  return buf;
}

}  // namespace

nlohmann::json tlx_summary_json(const TlxSummary& summary) {
  nlohmann::json dims = nlohmann::json::object();
  for (std::size_t d = 0; d < kTlxDimensions; ++d) {
    dims[std::string(to_string(kTlxOrder[d]))] = summary_json(summary.dimensions[d]);
  }
  return {{"respondents", summary.respondents},
          {"sd_convention", "sample (n-1)"},
          {"dimensions", dims},
          {"raw_tlx", summary.raw_tlx},
          {"raw_tlx_overall", summary_json(summary.overall)}};
}

std::string tlx_summary_text(const TlxSummary& summary) {
  std::ostringstream os;
  os << "NASA-TLX (raw), n = " << summary.respondents << ", SD uses n - 1\n";
  char buf[32];
  for (std::size_t d = 0; d < kTlxDimensions; ++d) {
    std::snprintf(buf, sizeof buf, "%-12s", std::string(to_string(kTlxOrder[d])).c_str());
    os << buf << m_sd(summary.dimensions[d]) << "\n";
  }
  std::snprintf(buf, sizeof buf, "%-12s", "raw TLX");
  os << buf << m_sd(summary.overall) << "\n";
  return os.str();
}

std::vector<TlxResponse> read_tlx_csv(const std::filesystem::path& path) {
  std::vector<TlxResponse> out;
  for (const auto& row : read_csv(path, "participant")) {
    const std::string where = path.filename().string() + " line " + std::to_string(row.line);
    if (row.fields.size() != 1 + kTlxDimensions) {
      throw Error(ErrorCode::SchemaViolation,
                  where + ": expected participant and six subscale scores");
    }
    TlxResponse r;
    r.participant = row.fields[0];
    for (std::size_t d = 0; d < kTlxDimensions; ++d) {
      const auto& text = row.fields[1 + d];
      try {
        std::size_t used = 0;
        r.scores[d] = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw Error(ErrorCode::SchemaViolation, where + ": bad score '" + text + "'");
      }
    }
    try {
      r.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaViolation, where + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace natalia::metrics
