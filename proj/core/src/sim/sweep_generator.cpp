#include "natalia/sim/sweep_generator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "natalia/classifier/mock_backend.hpp"
#include "natalia/common/error.hpp"
#include "natalia/common/random.hpp"
#include "natalia/media/codec.hpp"

namespace natalia::sim {
namespace {

std::size_t parse_index(std::string_view text, std::string_view whole) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "bad frame number in label span '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::vector<LabelSpan> parse_label_spans(std::string_view text) {
  std::vector<LabelSpan> spans;
  bool more = !text.empty();
  while (more) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    more = comma != std::string_view::npos;
    text = more ? text.substr(comma + 1) : std::string_view{};

    const auto at = item.find('@');
    const auto dash = item.find('-', at == std::string_view::npos ? 0 : at);
    if (at == std::string_view::npos || dash == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  "label span must look like AC@10-14, got '" + std::string(item) + "'");
    }
    const auto label = parse_label(item.substr(0, at));
    if (!label || *label == PlaneLabel::NoPlane) {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown plane label in '" + std::string(item) + "'");
    }
    LabelSpan span{*label, parse_index(item.substr(at + 1, dash - at - 1), item),
                   parse_index(item.substr(dash + 1), item)};
    if (span.last < span.first) {
      throw Error(ErrorCode::InvalidArgument,
                  "label span end before start in '" + std::string(item) + "'");
    }
    spans.push_back(span);
  }
  return spans;
}

media::GrayFrame textured_frame(std::size_t index, media::Size size,
                                std::uint64_t seed) {
  // Coarse random lattice, bilinearly interpolated, plus fine grain.
  constexpr int kCell = 8;
  SeededRng rng(seed * 0x9E3779B97F4A7C15ull + index * 0xD1B54A32D192ED03ull + 1);
  const int gw = size.width / kCell + 2;
  const int gh = size.height / kCell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (double& v : lattice) v = 40.0 + static_cast<double>(rng.uniform_below(160));

  std::vector<std::uint8_t> px(static_cast<std::size_t>(size.width) * size.height);
  for (int y = 0; y < size.height; ++y) {
    const int cy = y / kCell;
    const double fy = static_cast<double>(y % kCell) / kCell;
    for (int x = 0; x < size.width; ++x) {
      const int cx = x / kCell;
      const double fx = static_cast<double>(x % kCell) / kCell;
      auto at = [&](int gx, int gy) { return lattice[static_cast<std::size_t>(gy) * gw + gx]; };
      const double v = (at(cx, cy) * (1 - fx) + at(cx + 1, cy) * fx) * (1 - fy) +
                       (at(cx, cy + 1) * (1 - fx) + at(cx + 1, cy + 1) * fx) * fy;
      const double grain = static_cast<double>(rng.uniform_below(31)) - 15.0;
      px[static_cast<std::size_t>(y) * size.width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(v + grain), 0L, 255L));
    }
  }
  return media::GrayFrame(index, size, std::move(px));
}

SyntheticSweep generate_sweep(const SweepSpec& spec) {
  if (spec.frame_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "frame count must be positive");
  }
  if (spec.peak_confidence <= 1.0 / 6.0 || spec.peak_confidence > 1.0 ||
      spec.floor_confidence <= 1.0 / 6.0 || spec.floor_confidence > spec.peak_confidence) {
    throw Error(ErrorCode::InvalidArgument,
                "confidences must satisfy 1/6 < floor <= peak <= 1");
  }
  auto spans = spec.spans;
  std::sort(spans.begin(), spans.end(),
            [](const LabelSpan& a, const LabelSpan& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].label == PlaneLabel::NoPlane) {
      throw Error(ErrorCode::InvalidArgument, "NO_PLANE cannot be planted");
    }
    if (spans[i].last >= spec.frame_count) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(spans[i].label)) + " span ends at frame " +
                      std::to_string(spans[i].last) + " but the sweep has " +
                      std::to_string(spec.frame_count) + " frames");
    }
    if (i > 0 && spans[i].first <= spans[i - 1].last) {
      throw Error(ErrorCode::InvalidArgument, "label spans overlap");
    }
  }

  GroundTruth truth;
  truth.frame_count = spec.frame_count;
  std::vector<media::GrayFrame> frames;
  frames.reserve(spec.frame_count);
  for (std::size_t i = 0; i < spec.frame_count; ++i) {
    auto f = textured_frame(i, spec.size, spec.seed);
    classifier::marker::clear(f);
    frames.push_back(std::move(f));
  }
  for (const auto& span : spans) {
    const std::size_t centre = span.first + (span.last - span.first) / 2;
    PlantedSpan planted{span, centre, 0.0};
    for (std::size_t i = span.first; i <= span.last; ++i) {
      const double distance = static_cast<double>(i > centre ? i - centre : centre - i);
      const double c = std::max(spec.floor_confidence,
                                spec.peak_confidence - spec.confidence_step * distance);
      classifier::marker::stamp(frames[i], span.label, c);
      const double encoded = classifier::marker::confidence_intensity(c) / 255.0;
      truth.frames.push_back({i, span.label, encoded});
      if (i == centre) planted.peak_confidence = encoded;
    }
    truth.spans.push_back(planted);
  }
  std::vector<media::GrayFrame> timed;
  timed.reserve(frames.size());
  for (auto& f : frames) {
    const double ts = 1000.0 * static_cast<double>(f.index()) / spec.fps;
    timed.emplace_back(f.index(), f.size(),
                       std::vector<std::uint8_t>(f.pixels().begin(), f.pixels().end()), ts);
  }
  return {media::FrameSequence(std::move(timed), "synthetic", spec.fps), std::move(truth)};
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : truth.spans) {
    spans.push_back({{"label", to_string(s.span.label)},
                     {"first", s.span.first},
                     {"last", s.span.last},
                     {"peak_index", s.peak_index},
                     {"peak_confidence", s.peak_confidence}});
  }
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : truth.frames) {
    frames.push_back({{"index", f.index},
                      {"label", to_string(f.label)},
                      {"confidence", f.confidence}});
  }
  return {{"schema", "natalia-ground-truth/1"},
          {"frame_count", truth.frame_count},
          {"spans", spans},
          {"frames", frames}};
}

void write_frame_directory(const SyntheticSweep& sweep,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (const auto& f : sweep.frames) {
    std::snprintf(name, sizeof name, "frame_%05zu.png", f.index());
    media::write_png(dir / name, f);
  }
  std::ofstream(dir / "meta.json") << nlohmann::json{{"fps", sweep.frames.fps().value_or(0.0)}}.dump(2) << "\n";
  std::ofstream(dir / "ground_truth.json") << to_json(sweep.truth).dump(2) << "\n";
}

}  // namespace natalia::sim
