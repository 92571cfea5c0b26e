#include "natalia/metrics/classification.hpp"

#include <cstdio>
#include <sstream>

#include "natalia/common/csv.hpp"
#include "natalia/common/error.hpp"

namespace natalia::metrics {

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < kLabelCount; ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix confusion(std::span<const LabelPair> pairs) {
  ConfusionMatrix cm;
  for (const auto& [truth, pred] : pairs) ++cm.counts[index_of(truth)][index_of(pred)];
  return cm;
}

namespace {

void require_non_empty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  require_non_empty(cm);
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::array<ClassScores, kLabelCount> per_class(const ConfusionMatrix& cm) {
  require_non_empty(cm);
  std::array<ClassScores, kLabelCount> out{};
  for (std::size_t k = 0; k < kLabelCount; ++k) {
    auto& s = out[k];
    for (std::size_t j = 0; j < kLabelCount; ++j) {
      s.support += cm.counts[k][j];
      s.predicted += cm.counts[j][k];
    }
    const auto tp = static_cast<double>(cm.counts[k][k]);
    s.precision = ratio(tp, static_cast<double>(s.predicted));
    s.recall = ratio(tp, static_cast<double>(s.support));
    s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  }
  return out;
}

double macro_f1(const ConfusionMatrix& cm) {
  const auto scores = per_class(cm);
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& s : scores) {
    if (s.support == 0 && s.predicted == 0) continue;
    sum += s.f1;
    ++present;
  }
  return sum / static_cast<double>(present);
}

double weighted_f1(const ConfusionMatrix& cm) {
  const auto scores = per_class(cm);
  double sum = 0.0;
  for (const auto& s : scores) sum += s.f1 * static_cast<double>(s.support);
  return sum / static_cast<double>(cm.total());
}

nlohmann::json classification_report_json(const ConfusionMatrix& cm) {
  nlohmann::json per = nlohmann::json::object();
  const auto scores = per_class(cm);
  for (PlaneLabel label : kAllLabels) {
    const auto& s = scores[index_of(label)];
    per[std::string(to_string(label))] = {{"precision", s.precision},
                                          {"recall", s.recall},
                                          {"f1", s.f1},
                                          {"support", s.support}};
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : cm.counts) matrix.push_back(row);
  nlohmann::json labels = nlohmann::json::array();
  for (PlaneLabel label : kAllLabels) labels.push_back(to_string(label));
  return {{"labels", labels},
          {"confusion", matrix},
          {"total", cm.total()},
          {"accuracy", accuracy(cm)},
          {"macro_f1", macro_f1(cm)},
          {"weighted_f1", weighted_f1(cm)},
          {"per_class", per}};
}

std::string classification_report_text(const ConfusionMatrix& cm) {
  std::ostringstream os;
  char buf[160];
  os << "confusion (rows = true, columns = predicted)\n";
  std::snprintf(buf, sizeof buf, "%-9s", "");
  os << buf;
  for (PlaneLabel label : kAllLabels) {
    std::snprintf(buf, sizeof buf, "%9s", std::string(to_string(label)).c_str());
    os << buf;
  }
  os << "\n";
  for (PlaneLabel t : kAllLabels) {
    std::snprintf(buf, sizeof buf, "%-9s", std::string(to_string(t)).c_str());
    os << buf;
    for (PlaneLabel p : kAllLabels) {
      std::snprintf(buf, sizeof buf, "%9llu", static_cast<unsigned long long>(cm.at(t, p)));
      os << buf;
    }
    os << "\n";
  }
  os << "\nlabel     precision  recall     f1         support\n";
  const auto scores = per_class(cm);
  for (PlaneLabel label : kAllLabels) {
    const auto& s = scores[index_of(label)];
    std::snprintf(buf, sizeof buf, "%-9s %-10.4f %-10.4f %-10.4f %llu\n",
                  std::string(to_string(label)).c_str(), s.precision, s.recall, s.f1,
                  static_cast<unsigned long long>(s.support));
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "\naccuracy    %.4f\nmacro F1    %.4f\nweighted F1 %.4f\n", accuracy(cm),
                macro_f1(cm), weighted_f1(cm));
  os << buf;
  return os.str();
}

std::vector<LabelPair> read_pairs_csv(const std::filesystem::path& path) {
  std::vector<LabelPair> pairs;
  for (const auto& row : read_csv(path, "true")) {
    const std::string where = path.filename().string() + " line " + std::to_string(row.line);
    if (row.fields.size() != 2) {
      throw Error(ErrorCode::SchemaViolation, where + ": expected true,pred");
    }
    const auto t = parse_label(row.fields[0]);
    const auto p = parse_label(row.fields[1]);
    if (!t || !p) {
      throw Error(ErrorCode::SchemaViolation, where + ": unknown label");
    }
    pairs.emplace_back(*t, *p);
  }
  return pairs;
}

}  // namespace natalia::metrics
