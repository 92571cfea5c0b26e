#include <gtest/gtest.h>

#include <fstream>

#include "cases.hpp"
#include "naive.hpp"
#include "natalia/common/error.hpp"
#include "natalia/metrics/agreement.hpp"
#include "natalia/metrics/classification.hpp"
#include "natalia/metrics/tlx.hpp"
#include "test_support.hpp"

namespace natalia::metrics {
namespace {

using L = PlaneLabel;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(Classification, HandComputedFixtures) { EXPECT_EQ(testing::check_classification_fixtures(), ""); }

TEST(Classification, MatchesCountingOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabelPair> pairs;
    const std::size_t n = 1 + rng() % 300;
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(label_at(rng() % 6), label_at(rng() % 6));
    const auto cm = confusion(pairs);
    const auto per = per_class(cm);
    const auto want = oracle::class_scores(pairs);
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      EXPECT_NEAR(per[k].precision, want[k].precision, 1e-12);
      EXPECT_NEAR(per[k].recall, want[k].recall, 1e-12);
      EXPECT_NEAR(per[k].f1, want[k].f1, 1e-12);
      EXPECT_EQ(per[k].support, want[k].support);
    }
    std::size_t hits = 0;
    for (const auto& [t, p] : pairs) hits += t == p;
    EXPECT_NEAR(accuracy(cm), static_cast<double>(hits) / static_cast<double>(n), 1e-12);
  }
}

TEST(Classification, DiagonalScoresOne) {
  const std::vector<LabelPair> pairs{{L::AC, L::AC}, {L::FL, L::FL}, {L::FL, L::FL}};
  const auto cm = confusion(pairs);
  EXPECT_EQ(macro_f1(cm), 1.0);
  EXPECT_EQ(weighted_f1(cm), 1.0);
  EXPECT_EQ(accuracy(cm), 1.0);
}

TEST(Classification, ZeroDivisionIsZero) {
  const std::vector<LabelPair> pairs{{L::AC, L::HS}};
  const auto per = per_class(confusion(pairs));
  EXPECT_EQ(per[0].precision, 0.0);
  EXPECT_EQ(per[0].f1, 0.0);
  EXPECT_EQ(per[2].recall, 0.0);
  EXPECT_EQ(macro_f1(confusion(pairs)), 0.0);
}

TEST(Classification, EmptyMatrix) {
  const ConfusionMatrix cm;
  EXPECT_EQ(code_of([&] { accuracy(cm); }), ErrorCode::EmptyMatrix);
  EXPECT_EQ(code_of([&] { macro_f1(cm); }), ErrorCode::EmptyMatrix);
  EXPECT_EQ(code_of([&] { per_class(cm); }), ErrorCode::EmptyMatrix);
}

TEST(Classification, ReportJsonAndText) {
  const auto pairs = read_pairs_csv(testing::fixtures_dir() / "metrics" / "toy_pairs.csv");
  const auto cm = confusion(pairs);
  const auto j = classification_report_json(cm);
  EXPECT_EQ(j["total"], 100);
  EXPECT_EQ(j["confusion"][0][5], 2);
  EXPECT_DOUBLE_EQ(j["per_class"]["AC"]["f1"].get<double>(), 16.0 / 19.0);
  const auto text = classification_report_text(cm);
  EXPECT_NE(text.find("0.8421"), std::string::npos) << text;
  EXPECT_NE(text.find("0.9700"), std::string::npos) << text;
}

TEST(Classification, PairsCsvErrors) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "p.csv";
  std::ofstream(path) << "true,pred\nAC,AC\nAC,XX\n";
  EXPECT_EQ(code_of([&] { read_pairs_csv(path); }), ErrorCode::SchemaViolation);
  std::ofstream(path) << "AC\n";
  EXPECT_EQ(code_of([&] { read_pairs_csv(path); }), ErrorCode::SchemaViolation);
}

TEST(Agreement, Table1HandComputed) { EXPECT_EQ(testing::check_agreement_fixture(), ""); }

TEST(Agreement, FirstRowDeltaAndText) {
  const auto rows = read_agreement_csv(testing::fixtures_dir() / "metrics" / "table1.csv");
  const auto report = agreement_report(rows);
  EXPECT_EQ(report.agreement[0].delta[0], 3);
  const auto text = agreement_report_text(report);
  EXPECT_NE(text.find("midwife-1"), std::string::npos);
  EXPECT_NE(text.find("-6*"), std::string::npos);  // midwife-2 HS
  const auto j = agreement_report_json(report);
  EXPECT_EQ(j["agreeing_cells"], 37);
  EXPECT_EQ(j["rows"][7]["planes"]["SS"]["presence"], "mismatch");
}

TEST(Agreement, EmptyHasNoRate) {
  const auto report = agreement_report({});
  EXPECT_FALSE(report.agreement_rate.has_value());
  EXPECT_EQ(report.total_cells, 0u);
}

TEST(Agreement, CsvErrors) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "t.csv";
  std::ofstream(path) << "m1,1,2,3\n";
  EXPECT_EQ(code_of([&] { read_agreement_csv(path); }), ErrorCode::SchemaViolation);
  std::ofstream(path) << "m1,1,2,3,4,5,1,2,3,4,-1\n";
  EXPECT_EQ(code_of([&] { read_agreement_csv(path); }), ErrorCode::SchemaViolation);
}

TEST(Tlx, HandComputedFixture) { EXPECT_EQ(testing::check_tlx_fixture(), ""); }

TEST(Tlx, SummarizeClosedForms) {
  const std::vector<double> one{40};
  const auto s1 = summarize(one);
  EXPECT_EQ(s1.mean, 40.0);
  EXPECT_FALSE(s1.sd.has_value());
  EXPECT_EQ(s1.population_sd, 0.0);

  const std::vector<double> two{10, 20};
  const auto s2 = summarize(two);
  EXPECT_NEAR(*s2.sd, std::sqrt(50.0), 1e-12);
  EXPECT_NEAR(*s2.population_sd, 5.0, 1e-12);
  EXPECT_EQ(code_of([] { summarize({}); }), ErrorCode::EmptyInput);
}

TEST(Tlx, ValidatesScores) {
  TlxResponse r{"P", {0, 5, 100, 50, 55, 95}};
  EXPECT_NO_THROW(r.validate());
  EXPECT_NEAR(r.raw_tlx(), 305.0 / 6, 1e-12);
  r.scores[2] = 101;
  EXPECT_THROW(r.validate(), Error);
  r.scores[2] = 12;
  EXPECT_THROW(r.validate(), Error);
  r.scores[2] = -5;
  EXPECT_THROW(r.validate(), Error);
  EXPECT_EQ(code_of([] { aggregate_tlx({}); }), ErrorCode::EmptyInput);
}

TEST(Tlx, TextReportsMeanAndSd) {
  const auto s = aggregate_tlx(read_tlx_csv(testing::fixtures_dir() / "metrics" / "tlx4.csv"));
  const auto text = tlx_summary_text(s);
  EXPECT_NE(text.find("mental      (M = 25.00, SD = 12.91)"), std::string::npos) << text;
  EXPECT_NE(text.find("physical    (M = 10.00, SD = 4.08)"), std::string::npos) << text;
  EXPECT_NE(text.find("performance (M = 17.50, SD = 6.45)"), std::string::npos) << text;
  const auto j = tlx_summary_json(s);
  EXPECT_EQ(j["sd_convention"], "sample (n-1)");
  EXPECT_DOUBLE_EQ(j["dimensions"]["temporal"]["mean"].get<double>(), 28.75);
}

TEST(Tlx, CsvErrors) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "t.csv";
  std::ofstream(path) << "participant,mental,physical,temporal,performance,effort,frustration\nP1,1,2\n";
  EXPECT_EQ(code_of([&] { read_tlx_csv(path); }), ErrorCode::SchemaViolation);
  std::ofstream(path) << "P1,10,10,10,10,10,abc\n";
  EXPECT_EQ(code_of([&] { read_tlx_csv(path); }), ErrorCode::SchemaViolation);
  std::ofstream(path) << "P1,10,10,10,10,10,7\n";
  EXPECT_EQ(code_of([&] { read_tlx_csv(path); }), ErrorCode::SchemaViolation);
}

}  // namespace
}  // namespace natalia::metrics
