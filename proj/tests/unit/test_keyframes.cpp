#include <gtest/gtest.h>

#include <map>
#include <set>

#include "natalia/classifier/mock_backend.hpp"
#include "natalia/common/error.hpp"
#include "natalia/keyframes/json.hpp"
#include "natalia/keyframes/keyframes.hpp"
#include "test_support.hpp"

namespace natalia::keyframes {
namespace {

using classifier::Prediction;

Prediction pred(std::size_t i, PlaneLabel label, double c) {
  classifier::ProbabilityVector p{};
  const double rest = (1 - c) / 5;
  p.fill(rest);
  p[index_of(label)] = c;
  return Prediction::from_probs(i, p);
}

std::vector<Prediction> from_labels(const std::vector<std::pair<PlaneLabel, double>>& seq) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < seq.size(); ++i) out.push_back(pred(i, seq[i].first, seq[i].second));
  return out;
}

SelectionConfig config(double tau, std::size_t gap, std::size_t k = 12, double dedup = 0.9) {
  SelectionConfig c;
  c.min_confidence = tau;
  c.max_gap = gap;
  c.max_per_label = k;
  c.dedup_ssim = dedup;
  return c;
}

// Runs as connected components: two qualifying frames of one label are linked
// when fewer than max_gap + 1 frames separate them.
std::vector<keyframes::Run> naive_runs(const std::vector<Prediction>& preds, const SelectionConfig& cfg) {
  std::vector<keyframes::Run> out;
  for (auto label : kPlaneLabels) {
    std::vector<const Prediction*> q;
    for (const auto& p : preds) {
      if (p.argmax == label && p.confidence >= cfg.min_confidence) q.push_back(&p);
    }
    std::vector<int> component(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      component[i] = static_cast<int>(i);
      for (std::size_t j = 0; j < i; ++j) {
        bool linked = true;
        for (std::size_t m = j; m < i; ++m) {
          linked = linked && q[m + 1]->frame_index - q[m]->frame_index - 1 <= cfg.max_gap;
        }
        if (linked) {
          component[i] = component[j];
          break;
        }
      }
    }
    std::map<int, keyframes::Run> runs;
    for (std::size_t i = 0; i < q.size(); ++i) {
      auto [it, fresh] = runs.try_emplace(component[i]);
      keyframes::Run& r = it->second;
      if (fresh) {
        r = {label, q[i]->frame_index, q[i]->frame_index, q[i]->frame_index, q[i]->confidence};
        continue;
      }
      r.end = q[i]->frame_index;
      if (q[i]->confidence > r.peak_confidence) {
        r.peak_confidence = q[i]->confidence;
        r.peak_index = q[i]->frame_index;
      }
    }
    for (auto& [id, r] : runs) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const keyframes::Run& a, const keyframes::Run& b) {
    return std::pair(a.start, a.label) < std::pair(b.start, b.label);
  });
  return out;
}

std::vector<Prediction> random_predictions(std::mt19937_64& rng, std::size_t n) {
  std::vector<Prediction> out;
  std::uniform_int_distribution<int> label(0, 5);
  std::uniform_int_distribution<int> conf(20, 100);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(pred(i, label_at(static_cast<std::size_t>(label(rng)) % 6), conf(rng) / 100.0));
  }
  return out;
}

bool covered_by(const keyframes::Run& r, const std::vector<keyframes::Run>& runs) {
  return std::any_of(runs.begin(), runs.end(), [&](const keyframes::Run& o) {
    return o.label == r.label && o.start <= r.start && r.end <= o.end;
  });
}

TEST(SelectionConfig, Validate) {
  EXPECT_NO_THROW(SelectionConfig{}.validate());
  EXPECT_THROW(config(0.0, 2).validate(), Error);
  EXPECT_THROW(config(1.0, 2).validate(), Error);
  EXPECT_THROW(config(0.5, 2, 0).validate(), Error);
  EXPECT_THROW(config(0.5, 2, 1, 1.5).validate(), Error);
  EXPECT_NO_THROW(config(0.5, 0, 1, -1.0).validate());
}

TEST(GroupRuns, BridgesGapsAndPicksFirstPeak) {
  using L = PlaneLabel;
  const auto preds = from_labels({{L::AC, 0.6},
                                  {L::AC, 0.9},
                                  {L::NoPlane, 1.0},
                                  {L::AC, 0.4},
                                  {L::AC, 0.9},
                                  {L::NoPlane, 1.0},
                                  {L::NoPlane, 1.0},
                                  {L::NoPlane, 1.0},
                                  {L::AC, 0.7}});
  const auto runs = group_runs(preds, config(0.5, 2));
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0], (keyframes::Run{L::AC, 0, 4, 1, 0.9}));
  EXPECT_EQ(runs[1], (keyframes::Run{L::AC, 8, 8, 8, 0.7}));
}

TEST(GroupRuns, BridgedFramesNeverPeak) {
  using L = PlaneLabel;
  // The FL frame inside the AC gap has higher confidence but another label;
  // the low-confidence AC frame is bridged but may not become the peak.
  const auto preds = from_labels({{L::AC, 0.6}, {L::FL, 0.99}, {L::AC, 0.45}, {L::AC, 0.55}});
  const auto runs = group_runs(preds, config(0.5, 2));
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0], (keyframes::Run{L::AC, 0, 3, 0, 0.6}));
  EXPECT_EQ(runs[1], (keyframes::Run{L::FL, 1, 1, 1, 0.99}));
}

TEST(GroupRuns, LabelsGroupIndependently) {
  using L = PlaneLabel;
  const auto preds = from_labels({{L::HS, 0.8}, {L::SS, 0.8}, {L::HS, 0.8}, {L::SS, 0.8}});
  const auto runs = group_runs(preds, config(0.5, 1));
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].label, L::HS);
  EXPECT_EQ(runs[0].end, 2u);
  EXPECT_EQ(runs[1].label, L::SS);
  EXPECT_EQ(runs[1].start, 1u);
}

TEST(GroupRuns, NoPlaneNeverForms) {
  const auto preds = from_labels({{PlaneLabel::NoPlane, 1.0}, {PlaneLabel::NoPlane, 1.0}});
  EXPECT_TRUE(group_runs(preds, config(0.5, 2)).empty());
}

// Raising tau can split a run, so the run count is not monotone in tau.
TEST(GroupRuns, RunCountNotMonotoneInTau) {
  using L = PlaneLabel;
  const auto preds = from_labels({{L::AC, 0.9}, {L::AC, 0.6}, {L::AC, 0.9}});
  EXPECT_EQ(group_runs(preds, config(0.5, 0)).size(), 1u);
  EXPECT_EQ(group_runs(preds, config(0.7, 0)).size(), 2u);
}

TEST(GroupRuns, MatchesComponentOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto preds = random_predictions(rng, 1 + rng() % 120);
    const auto cfg = config(0.3 + (rng() % 60) / 100.0, rng() % 5);
    EXPECT_EQ(group_runs(preds, cfg), naive_runs(preds, cfg)) << "trial " << trial;
  }
}

TEST(GroupRuns, MonotoneProperties) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    const auto preds = random_predictions(rng, 1 + rng() % 150);
    const double tau = 0.3 + (rng() % 50) / 100.0;
    const std::size_t gap = rng() % 4;
    const auto base = group_runs(preds, config(tau, gap));

    // Higher tau: every run lies inside a run at the lower tau.
    for (const auto& r : group_runs(preds, config(tau + 0.1, gap))) {
      EXPECT_TRUE(covered_by(r, base));
    }
    // Larger gap: runs only merge, so each old run is covered and the count
    // does not grow.
    const auto wider = group_runs(preds, config(tau, gap + 1));
    EXPECT_LE(wider.size(), base.size());
    for (const auto& r : base) EXPECT_TRUE(covered_by(r, wider));
    // Peaks qualify and sit inside their run.
    for (const auto& r : base) {
      EXPECT_GE(r.peak_confidence, tau);
      EXPECT_LE(r.start, r.peak_index);
      EXPECT_LE(r.peak_index, r.end);
      EXPECT_EQ(preds[r.peak_index].argmax, r.label);
    }
  }
}

media::FrameSequence textured_sequence(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<media::GrayFrame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(testing::random_frame(rng, 32, 32, i));
  return media::FrameSequence(std::move(frames), "t");
}

TEST(SelectKeyframes, OnePeakPerRunOrderedByFrame) {
  const auto seq = textured_sequence(20, 1);
  const std::vector<keyframes::Run> runs{{PlaneLabel::FL, 10, 12, 11, 0.8}, {PlaneLabel::AC, 2, 5, 3, 0.7}};
  const auto kf = select_keyframes(runs, seq, config(0.5, 2));
  ASSERT_EQ(kf.size(), 2u);
  EXPECT_EQ(kf[0].frame_index, 3u);
  EXPECT_EQ(kf[0].run, runs[1]);
  EXPECT_EQ(kf[1].frame_index, 11u);
  EXPECT_EQ(count_by_plane(kf), (PlaneCounts{1, 0, 0, 0, 1}));
}

TEST(SelectKeyframes, DedupDropsNearDuplicates) {
  std::mt19937_64 rng(2);
  std::vector<media::GrayFrame> frames;
  const auto base = testing::smooth_frame(rng, 32, 32, 0);
  frames.push_back(base);
  frames.push_back(base.with_index(1));
  frames.push_back(testing::random_frame(rng, 32, 32, 2));
  const media::FrameSequence seq(frames, "d");
  const std::vector<keyframes::Run> runs{{PlaneLabel::AC, 0, 0, 0, 0.7},
                              {PlaneLabel::AC, 1, 1, 1, 0.8},
                              {PlaneLabel::AC, 2, 2, 2, 0.6}};
  const auto kf = select_keyframes(runs, seq, config(0.5, 0));
  ASSERT_EQ(kf.size(), 2u);
  EXPECT_EQ(kf[0].frame_index, 1u);  // the higher-confidence twin survives
  EXPECT_EQ(kf[1].frame_index, 2u);

  // Identical frames have SSIM exactly 1, which never exceeds a threshold of 1.
  EXPECT_EQ(select_keyframes(runs, seq, config(0.5, 0, 12, 1.0)).size(), 3u);
}

TEST(SelectKeyframes, CapKeepsHighestConfidencePrefix) {
  const auto seq = textured_sequence(40, 3);
  std::vector<keyframes::Run> runs;
  for (std::size_t i = 0; i < 8; ++i) {
    runs.push_back({PlaneLabel::BPD, 4 * i, 4 * i, 4 * i, 0.5 + 0.05 * static_cast<double>(i % 5)});
  }
  std::vector<KeyFrame> prev;
  for (std::size_t k = 1; k <= 9; ++k) {
    const auto kf = select_keyframes(runs, seq, config(0.5, 0, k, 0.99));
    EXPECT_EQ(kf.size(), std::min<std::size_t>(k, 8));
    for (const auto& p : prev) {
      EXPECT_TRUE(std::find(kf.begin(), kf.end(), p) != kf.end());
    }
    for (const auto& f : kf) {
      for (const auto& r : runs) {
        const bool dropped = std::none_of(kf.begin(), kf.end(),
                                          [&](const KeyFrame& x) { return x.frame_index == r.peak_index; });
        if (dropped) EXPECT_GE(f.confidence, r.peak_confidence);
      }
    }
    prev = kf;
  }
}

TEST(SelectKeyframes, PeakOutsideSequence) {
  const auto seq = textured_sequence(5, 4);
  const std::vector<keyframes::Run> runs{{PlaneLabel::AC, 5, 5, 5, 0.9}};
  try {
    select_keyframes(runs, seq, SelectionConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(ProcessSweep, MockPipeline) {
  std::mt19937_64 rng(5);
  std::vector<media::GrayFrame> frames;
  for (std::size_t i = 0; i < 30; ++i) {
    auto f = testing::random_frame(rng, 64, 64, i);
    if (i >= 5 && i <= 9) {
      classifier::marker::stamp(f, PlaneLabel::SS, i == 7 ? 0.95 : 0.7);
    } else {
      classifier::marker::clear(f);
    }
    frames.push_back(std::move(f));
  }
  const media::FrameSequence seq(frames, "p");
  classifier::MockBackend mock({64, 64});
  const auto r = process_sweep(seq, mock, SelectionConfig{}, 4);
  EXPECT_EQ(r.backend, "mock:64x64");
  EXPECT_EQ(r.frame_count, 30u);
  EXPECT_EQ(r.predictions.size(), 30u);
  ASSERT_EQ(r.keyframes.size(), 1u);
  EXPECT_EQ(r.keyframes[0].frame_index, 7u);
  EXPECT_EQ(r.keyframes[0].run.start, 5u);
  EXPECT_EQ(r.keyframes[0].run.end, 9u);
  EXPECT_EQ(r.counts, (PlaneCounts{0, 0, 0, 1, 0}));

  try {
    process_sweep(media::FrameSequence{}, mock, SelectionConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(StudyResultJson, RoundTrip) {
  StudyResult r;
  r.backend = "mock";
  r.frame_count = 3;
  r.config = config(0.6, 1, 4, 0.8);
  r.predictions = {pred(0, PlaneLabel::AC, 0.7), pred(1, PlaneLabel::NoPlane, 0.5),
                   pred(2, PlaneLabel::FL, 1.0 / 3.0)};
  r.keyframes = {{0, PlaneLabel::AC, 0.7, {PlaneLabel::AC, 0, 0, 0, 0.7}}};
  r.counts = {1, 0, 0, 0, 0};
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("schema"), kStudyResultSchema);
  EXPECT_EQ(parse_study_result(nlohmann::json::parse(j.dump())), r);

  auto bad = j;
  bad["keyframes"][0]["label"] = "XX";
  EXPECT_THROW(parse_study_result(bad), Error);
  EXPECT_EQ(keyframe_filename(r.keyframes[0]), "frame_00000_AC.png");
}

}  // namespace
}  // namespace natalia::keyframes
