#include "natalia/media/frame.hpp"

#include <algorithm>
#include <cmath>

#include "natalia/common/error.hpp"

namespace natalia::media {

GrayFrame::GrayFrame(std::size_t index, Size size,
                     std::vector<std::uint8_t> pixels,
                     std::optional<double> timestamp_ms)
    : index_(index),
      size_(size),
      pixels_(std::move(pixels)),
      timestamp_ms_(timestamp_ms) {
  if (size_.width < kMinFrameSide || size_.height < kMinFrameSide) {
    throw Error(ErrorCode::InvalidArgument,
                "frame must be at least 16x16, got " +
                    std::to_string(size_.width) + "x" +
                    std::to_string(size_.height));
  }
  if (pixels_.size() != static_cast<std::size_t>(size_.width) * size_.height) {
    throw Error(ErrorCode::InvalidArgument,
                "pixel buffer length " + std::to_string(pixels_.size()) +
                    " does not match " + std::to_string(size_.width) + "x" +
                    std::to_string(size_.height));
  }
}

GrayFrame GrayFrame::filled(std::size_t index, Size size, std::uint8_t value) {
  return GrayFrame(index, size,
                   std::vector<std::uint8_t>(
                       static_cast<std::size_t>(std::max(size.width, 0)) *
                           static_cast<std::size_t>(std::max(size.height, 0)),
                       value));
}

GrayFrame GrayFrame::with_index(std::size_t index) const {
  GrayFrame copy = *this;
  copy.index_ = index;
  return copy;
}

FrameSequence::FrameSequence(std::vector<GrayFrame> frames,
                             std::string source_id, std::optional<double> fps)
    : frames_(std::move(frames)), source_id_(std::move(source_id)), fps_(fps) {
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].index() != i) {
      throw Error(ErrorCode::InvalidArgument,
                  "frame indices must be contiguous from 0; position " +
                      std::to_string(i) + " holds index " +
                      std::to_string(frames_[i].index()));
    }
    if (frames_[i].size() != frames_.front().size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "frame " + std::to_string(i) + " size differs from frame 0");
    }
  }
}

std::optional<Size> FrameSequence::frame_size() const noexcept {
  if (frames_.empty()) return std::nullopt;
  return frames_.front().size();
}

namespace {

struct Tap {
  int lo;
  int hi;
  double weight_hi;
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, src - 1);
    taps[static_cast<std::size_t>(d)] = {lo, hi, s - lo};
  }
  return taps;
}

}  // namespace

GrayFrame resize_bilinear(const GrayFrame& frame, Size target) {
  if (target == frame.size()) return frame;
  if (target.width < kMinFrameSide || target.height < kMinFrameSide) {
    throw Error(ErrorCode::InvalidArgument, "resize target below 16x16");
  }
  const auto xs = make_taps(frame.width(), target.width);
  const auto ys = make_taps(frame.height(), target.height);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(target.width) *
                                target.height);
  for (int y = 0; y < target.height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < target.width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      const double top = frame.at(tx.lo, ty.lo) * (1.0 - tx.weight_hi) +
                         frame.at(tx.hi, ty.lo) * tx.weight_hi;
      const double bottom = frame.at(tx.lo, ty.hi) * (1.0 - tx.weight_hi) +
                            frame.at(tx.hi, ty.hi) * tx.weight_hi;
      const double v = top * (1.0 - ty.weight_hi) + bottom * ty.weight_hi;
      out[static_cast<std::size_t>(y) * target.width + x] =
          static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return GrayFrame(frame.index(), target, std::move(out), frame.timestamp_ms());
}

FrameSequence resize_sequence(const FrameSequence& seq, Size target) {
  if (seq.empty() || seq.frame_size() == target) return seq;
  std::vector<GrayFrame> frames;
  frames.reserve(seq.size());
  for (const auto& f : seq) frames.push_back(resize_bilinear(f, target));
  return FrameSequence(std::move(frames), seq.source_id(), seq.fps());
}

}  // namespace natalia::media
