#include <gtest/gtest.h>

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cases.hpp"
#include "natalia/common/error.hpp"
#include "natalia/dataset/builder.hpp"
#include "natalia/dataset/manifest.hpp"
#include "natalia/media/decode.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace natalia::dataset {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

fs::path golden_dir() { return testing::fixtures_dir() / "dataset"; }

media::FrameSequence chain(std::size_t n, std::uint64_t seed, int amplitude) {
  std::mt19937_64 rng(seed);
  const auto base = testing::smooth_frame(rng, 32, 32);
  std::vector<media::GrayFrame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(testing::perturb(base, rng, amplitude, i));
  return media::FrameSequence(std::move(frames), "c");
}

TEST(PropagateLabels, StopsAtFirstFailingFrame) {
  std::mt19937_64 rng(1);
  const auto base = testing::smooth_frame(rng, 32, 32);
  std::vector<media::GrayFrame> frames;
  for (std::size_t i = 0; i < 10; ++i) {
    frames.push_back(i == 6 ? testing::random_frame(rng, 32, 32, i)
                            : testing::perturb(base, rng, 3, i));
  }
  const media::FrameSequence seq(frames, "c");
  const std::vector<SeedAnnotation> seeds{{"c", 3, PlaneLabel::HS}};
  const auto out = propagate_labels(seq, seeds, 0.8, 0.8);
  ASSERT_EQ(out.size(), 6u);  // 0..5; frame 6 breaks the forward walk
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].frame_index, i);
    EXPECT_EQ(out[i].label, PlaneLabel::HS);
    EXPECT_EQ(out[i].provenance, i == 3 ? Provenance::Seed : Provenance::Propagated);
    EXPECT_EQ(out[i].similarity.has_value(), i != 3);
  }
}

TEST(PropagateLabels, ConstantFrameStopsWalk) {
  auto frames = chain(6, 2, 3).frames();
  frames[4] = media::GrayFrame::filled(4, {32, 32}, 90);
  const media::FrameSequence seq(frames, "c");
  const std::vector<SeedAnnotation> seeds{{"c", 1, PlaneLabel::AC}};
  EXPECT_EQ(propagate_labels(seq, seeds, 0.5, 0.5).back().frame_index, 3u);
}

TEST(PropagateLabels, StrongerSeedWins) {
  const auto seq = chain(12, 3, 4);
  const std::vector<SeedAnnotation> seeds{{"c", 2, PlaneLabel::AC}, {"c", 9, PlaneLabel::FL}};
  testing::PropagationCase c{seq, seeds, 0.3, 0.3};
  EXPECT_EQ(testing::check_propagation(c), "");
  const auto out = propagate_labels(seq, seeds, 0.3, 0.3);
  EXPECT_EQ(out.size(), 12u);
  EXPECT_EQ(out[2].provenance, Provenance::Seed);
  EXPECT_EQ(out[9].label, PlaneLabel::FL);
}

TEST(PropagateLabels, Errors) {
  const auto seq = chain(5, 4, 2);
  const std::vector<SeedAnnotation> out_of_range{{"c", 5, PlaneLabel::AC}};
  EXPECT_EQ(code_of([&] { propagate_labels(seq, out_of_range, 0.9, 0.9); }),
            ErrorCode::IndexOutOfRange);
  const std::vector<SeedAnnotation> foreign{{"x", 1, PlaneLabel::AC}};
  EXPECT_EQ(code_of([&] { propagate_labels(seq, foreign, 0.9, 0.9); }), ErrorCode::InvalidArgument);
  const std::vector<SeedAnnotation> conflict{{"c", 1, PlaneLabel::AC}, {"c", 1, PlaneLabel::HS}};
  EXPECT_EQ(code_of([&] { propagate_labels(seq, conflict, 0.9, 0.9); }), ErrorCode::InvalidArgument);
  const std::vector<SeedAnnotation> ok{{"c", 1, PlaneLabel::AC}, {"c", 1, PlaneLabel::AC}};
  const auto deduped = propagate_labels(seq, ok, 0.9, 0.9);
  EXPECT_EQ(std::count_if(deduped.begin(), deduped.end(),
                          [](const ManifestEntry& e) { return e.provenance == Provenance::Seed; }),
            1);
  EXPECT_EQ(code_of([&] { propagate_labels(seq, ok, 0.0, 0.9); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { propagate_labels(seq, ok, 0.9, 1.1); }), ErrorCode::InvalidArgument);
}

TEST(PropagateLabels, MatchesBruteForceOracle) {
  std::mt19937_64 rng(4242);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 50; ++i) {
    const auto c = testing::random_propagation_case(rng);
    EXPECT_EQ(testing::check_propagation(c), "") << "case " << i;
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(30));
}

TEST(SubsampleNegatives, FloorCountSortedAndSeeded) {
  std::vector<FrameRef> pool;
  for (std::size_t i = 0; i < 100; ++i) pool.push_back({i % 2 ? "b" : "a", i});
  pool.push_back(pool.front());  // duplicates collapse
  const auto picked = subsample_negatives(pool, 0.29, 5);
  ASSERT_EQ(picked.size(), 29u);
  EXPECT_TRUE(std::is_sorted(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
    return a.ref() < b.ref();
  }));
  for (const auto& e : picked) {
    EXPECT_EQ(e.label, PlaneLabel::NoPlane);
    EXPECT_EQ(e.provenance, Provenance::NegativeSampled);
  }
  EXPECT_EQ(subsample_negatives(pool, 0.29, 5), picked);
  EXPECT_NE(subsample_negatives(pool, 0.29, 6), picked);
  EXPECT_EQ(subsample_negatives(pool, 1.0, 5).size(), 100u);
  EXPECT_EQ(code_of([&] { subsample_negatives(pool, 0.0, 1); }), ErrorCode::InvalidArgument);
}

TEST(SplitDataset, ConservesCountsAndFloorRule) {
  std::mt19937_64 rng(99);
  const std::vector<testing::Fraction> fractions{{4, 5}, {1, 2}, {7, 10}, {3, 4}, {9, 10}};
  for (int i = 0; i < 100; ++i) {
    const auto before = testing::random_unsplit_manifest(rng);
    const auto f = fractions[static_cast<std::size_t>(i) % fractions.size()];
    const auto after = split_dataset(before, f.value(), rng());
    EXPECT_EQ(testing::check_split(before, after, f), "") << "manifest " << i;
  }
}

TEST(SplitDataset, SingletonGoesToVal) {
  DatasetManifest m;
  m.entries.push_back({"s", 0, PlaneLabel::HS, Provenance::Seed, std::nullopt, Split::Unassigned});
  m.recount();
  EXPECT_EQ(split_dataset(m, 0.8, 1).entries[0].split, Split::Val);
}

TEST(SplitDataset, Errors) {
  std::mt19937_64 rng(5);
  const auto m = testing::random_unsplit_manifest(rng);
  const auto split = split_dataset(m, 0.8, 1);
  EXPECT_EQ(code_of([&] { split_dataset(split, 0.8, 1); }), ErrorCode::AlreadySplit);
  EXPECT_EQ(code_of([&] { split_dataset(m, 1.0, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { split_dataset(m, 0.0, 1); }), ErrorCode::InvalidArgument);
}

std::vector<media::FrameSequence> golden_sequences() {
  std::vector<media::FrameSequence> seqs;
  for (const char* name : {"seqA", "seqB"}) {
    seqs.push_back(media::decode_video(golden_dir() / "frames" / name));
  }
  return seqs;
}

// golden_manifest.json was produced by tests/oracles/python/make_dataset_golden.py.
TEST(BuildManifest, MatchesGolden) {
  const auto params = nlohmann::json::parse(testing::read_text(golden_dir() / "params.json"));
  BuildOptions opt;
  opt.thresholds = {params["ssim_min"], params["ncc_min"]};
  opt.negative_fraction = params["neg_fraction"];
  opt.train_fraction = params["train_fraction"];
  opt.seed = params["seed"];
  const auto seqs = golden_sequences();
  const auto seeds = read_seed_csv(golden_dir() / "seeds.csv");
  const auto got = build_manifest(seqs, seeds, opt);
  const auto want = read_manifest(golden_dir() / "golden_manifest.json");

  EXPECT_EQ(got.class_counts, want.class_counts);
  EXPECT_EQ(got.class_counts, (ClassCounts{5, 4, 1, 4, 3, 16}));
  EXPECT_EQ(got.rng_seed, 42u);
  ASSERT_EQ(got.entries.size(), want.entries.size());
  for (std::size_t i = 0; i < got.entries.size(); ++i) {
    const auto& g = got.entries[i];
    const auto& w = want.entries[i];
    EXPECT_EQ(g.ref(), w.ref()) << i;
    EXPECT_EQ(g.label, w.label) << i;
    EXPECT_EQ(g.provenance, w.provenance) << i;
    EXPECT_EQ(g.split, w.split) << i;
    ASSERT_EQ(g.similarity.has_value(), w.similarity.has_value()) << i;
    if (g.similarity) {
      EXPECT_NEAR(g.similarity->ssim, w.similarity->ssim, 1e-9) << i;
      EXPECT_NEAR(g.similarity->ncc, w.similarity->ncc, 1e-9) << i;
    }
  }
}

TEST(BuildManifest, UnknownSourceAndDuplicates) {
  const auto seqs = golden_sequences();
  const std::vector<SeedAnnotation> seeds{{"nope", 1, PlaneLabel::AC}};
  EXPECT_EQ(code_of([&] { build_manifest(seqs, seeds, BuildOptions{}); }), ErrorCode::InvalidArgument);
  const std::vector<media::FrameSequence> twice{seqs[0], seqs[0]};
  EXPECT_EQ(code_of([&] { build_manifest(twice, {}, BuildOptions{}); }), ErrorCode::InvalidArgument);
}

TEST(ManifestJson, RoundTripExact) {
  std::mt19937_64 rng(7);
  auto m = split_dataset(testing::random_unsplit_manifest(rng), 0.8, 3);
  m.entries.front().provenance = Provenance::Propagated;
  m.entries.front().similarity = media::SimilarityScore{0.9512345678901234, 0.9999999999999999};
  m.thresholds = {0.9, 0.95};
  const auto text = manifest_to_json(m);
  EXPECT_EQ(manifest_from_json(text), m);
  EXPECT_EQ(manifest_to_json(manifest_from_json(text)), text);
}

TEST(ManifestJson, SchemaViolationsNameTheProblem) {
  const auto golden = testing::read_text(golden_dir() / "golden_manifest.json");
  auto expect_violation = [](const std::string& text, const std::string& needle) {
    try {
      manifest_from_json(text);
      ADD_FAILURE() << "accepted: " << needle;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_violation("{\n  \"schema\": \n}", "line 3");

  auto doc = nlohmann::json::parse(golden);
  auto edit = [&](auto fn) {
    auto copy = doc;
    fn(copy);
    return copy.dump(2);
  };
  expect_violation(edit([](auto& d) { d["schema"] = "other/1"; }), "schema");
  expect_violation(edit([](auto& d) { d["entries"][2]["label"] = "XX"; }), "entries[2].label");
  expect_violation(edit([](auto& d) { d["entries"][0].erase("split"); }), "entries[0]");
  expect_violation(edit([](auto& d) { d["entries"][0]["similarity"]["ssim"] = 0.5; }),
                   "entries[0].similarity");
  expect_violation(edit([](auto& d) { d["entries"][1] = d["entries"][0]; }), "duplicate");
  expect_violation(edit([](auto& d) { d["class_counts"]["AC"] = 99; }), "class_counts.AC");
  expect_violation(edit([](auto& d) { d["entries"][0]["frame_index"] = -1; }), "frame_index");
}

TEST(SeedCsv, Errors) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "seeds.csv";
  std::ofstream(path) << "source_id,frame_index,label\nseqA,3,AC\nseqA,x,AC\n";
  try {
    read_seed_csv(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::ofstream(path) << "seqA,3,ZZ\n";
  EXPECT_EQ(code_of([&] { read_seed_csv(path); }), ErrorCode::SchemaViolation);
  std::ofstream(path) << "seqA,3\n";
  EXPECT_EQ(code_of([&] { read_seed_csv(path); }), ErrorCode::SchemaViolation);
}

}  // namespace
}  // namespace natalia::dataset
