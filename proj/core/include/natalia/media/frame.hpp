#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace natalia::media {

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

inline constexpr int kMinFrameSide = 16;

/// A decoded 8-bit grayscale frame. Pixels are row-major.
class GrayFrame {
 public:
  /// Throws Error{InvalidArgument} when the pixel buffer does not match the
  /// dimensions or either side is below kMinFrameSide.
  GrayFrame(std::size_t index, Size size, std::vector<std::uint8_t> pixels,
            std::optional<double> timestamp_ms = std::nullopt);

  static GrayFrame filled(std::size_t index, Size size, std::uint8_t value);

  std::size_t index() const noexcept { return index_; }
  Size size() const noexcept { return size_; }
  int width() const noexcept { return size_.width; }
  int height() const noexcept { return size_.height; }
  std::optional<double> timestamp_ms() const noexcept { return timestamp_ms_; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> mutable_pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * size_.width + x];
  }
  void set(int x, int y, std::uint8_t v) noexcept {
    pixels_[static_cast<std::size_t>(y) * size_.width + x] = v;
  }

  GrayFrame with_index(std::size_t index) const;

  friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

 private:
  std::size_t index_;
  Size size_;
  std::vector<std::uint8_t> pixels_;
  std::optional<double> timestamp_ms_;
};

/// An ordered run of frames from one recording. Indices are 0..n-1 and all
/// frames share one size.
class FrameSequence {
 public:
  FrameSequence() = default;
  /// Throws Error{InvalidArgument} if the invariants do not hold.
  FrameSequence(std::vector<GrayFrame> frames, std::string source_id,
                std::optional<double> fps = std::nullopt);

  const std::vector<GrayFrame>& frames() const noexcept { return frames_; }
  const GrayFrame& operator[](std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  const std::string& source_id() const noexcept { return source_id_; }
  std::optional<double> fps() const noexcept { return fps_; }
  std::optional<Size> frame_size() const noexcept;

  auto begin() const noexcept { return frames_.begin(); }
  auto end() const noexcept { return frames_.end(); }

 private:
  std::vector<GrayFrame> frames_;
  std::string source_id_;
  std::optional<double> fps_;
};

/// ITU-R BT.601 luma, rounded half up: (299 R + 587 G + 114 B + 500) / 1000.
constexpr std::uint8_t bt601_luma(std::uint8_t r, std::uint8_t g,
                                  std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) /
                                   1000u);
}

/// Bilinear resampling with pixel-centre alignment (source coordinate
/// (d + 0.5) * scale - 0.5, clamped to the image), rounded to nearest.
GrayFrame resize_bilinear(const GrayFrame& frame, Size target);

FrameSequence resize_sequence(const FrameSequence& seq, Size target);

}  // namespace natalia::media
