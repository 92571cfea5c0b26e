#include "natalia/media/decode.hpp"

#include <atomic>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <functional>
#include <regex>

#include <unistd.h>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/videoio.hpp>

#include "natalia/common/error.hpp"
#include "natalia/media/archive.hpp"
#include "natalia/media/codec.hpp"

namespace fs = std::filesystem;

namespace natalia::media {
namespace {

// Frame number from "frame_00012.png" (at least five digits), if it matches.
std::optional<std::size_t> frame_number(const std::string& filename) {
  static const std::regex pattern(R"(frame_(\d{5,})\.png)");
  std::smatch m;
  if (!std::regex_match(filename, m, pattern)) return std::nullopt;
  std::size_t value = 0;
  const auto s = m[1].str();
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc()) return std::nullopt;
  return value;
}

std::optional<double> parse_meta(std::span<const std::uint8_t> bytes) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptStream, std::string("meta.json: ") + e.what());
  }
  if (meta.contains("fps") && meta["fps"].is_number()) {
    return meta["fps"].get<double>();
  }
  return std::nullopt;
}

// Ordered PNG payloads keyed by frame number; `load` yields their bytes.
template <typename Load>
FrameSequence assemble(const std::map<std::size_t, Load>& numbered,
                       std::optional<double> fps, const std::string& source_id,
                       std::optional<Size> target) {
  if (numbered.empty()) {
    throw Error(ErrorCode::CorruptStream, "no frames found in " + source_id);
  }
  std::vector<GrayFrame> frames;
  frames.reserve(numbered.size());
  std::optional<Size> native;
  std::size_t expected = numbered.begin()->first;
  for (const auto& [number, load] : numbered) {
    if (number != expected) {
      throw Error(ErrorCode::CorruptStream,
                  source_id + ": missing frame " + std::to_string(expected));
    }
    ++expected;
    const std::size_t index = frames.size();
    GrayFrame frame = decode_png(load(), index);
    if (!native) native = frame.size();
    if (frame.size() != *native) {
      throw Error(ErrorCode::CorruptStream,
                  source_id + ": frame " + std::to_string(number) +
                      " has different dimensions");
    }
    if (fps && *fps > 0) {
      frame = GrayFrame(index, frame.size(),
                        {frame.pixels().begin(), frame.pixels().end()},
                        1000.0 * static_cast<double>(index) / *fps);
    }
    frames.push_back(target ? resize_bilinear(frame, *target) : std::move(frame));
  }
  return FrameSequence(std::move(frames), source_id, fps);
}

FrameSequence decode_frame_directory(const fs::path& dir,
                                     std::optional<Size> target) {
  std::map<std::size_t, std::function<std::vector<std::uint8_t>()>> numbered;
  std::optional<double> fps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "meta.json") {
      fps = parse_meta(read_file(entry.path()));
    } else if (auto n = frame_number(name)) {
      const fs::path p = entry.path();
      numbered.emplace(*n, [p] { return read_file(p); });
    }
  }
  return assemble(numbered, fps, dir.filename().string(), target);
}

FrameSequence decode_archive(std::span<const std::uint8_t> bytes,
                             const std::string& source_id,
                             std::optional<Size> target) {
  const auto members = read_tar(bytes);
  std::map<std::size_t, std::function<std::vector<std::uint8_t>()>> numbered;
  std::optional<double> fps;
  for (const auto& m : members) {
    const auto slash = m.name.find_last_of('/');
    const auto base = slash == std::string::npos ? m.name : m.name.substr(slash + 1);
    if (base == "meta.json") {
      fps = parse_meta(m.data);
    } else if (auto n = frame_number(base)) {
      const auto* member = &m;
      numbered.emplace(*n, [member] { return member->data; });
    }
  }
  return assemble(numbered, fps, source_id, target);
}

FrameSequence decode_mp4_file(const fs::path& path, const std::string& source_id,
                              std::optional<Size> target) {
  cv::VideoCapture capture;
  try {
    capture.open(path.string(), cv::CAP_FFMPEG);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::CorruptStream, std::string("video open: ") + e.what());
  }
  if (!capture.isOpened()) {
    throw Error(ErrorCode::CorruptStream, "cannot open video stream " + source_id);
  }
  const double fps_prop = capture.get(cv::CAP_PROP_FPS);
  const std::optional<double> fps =
      fps_prop > 0 ? std::optional<double>(fps_prop) : std::nullopt;
  const auto declared = static_cast<long long>(capture.get(cv::CAP_PROP_FRAME_COUNT));
  std::vector<GrayFrame> frames;
  std::optional<Size> native;
  cv::Mat bgr;
  while (true) {
    bool ok = false;
    try {
      ok = capture.read(bgr);
    } catch (const cv::Exception& e) {
      throw Error(ErrorCode::CorruptStream, std::string("video decode: ") + e.what());
    }
    if (!ok || bgr.empty()) break;
    if (bgr.depth() != CV_8U || (bgr.channels() != 3 && bgr.channels() != 1)) {
      throw Error(ErrorCode::UnsupportedFormat, "unexpected decoded pixel format");
    }
    if (bgr.cols < kMinFrameSide || bgr.rows < kMinFrameSide) {
      throw Error(ErrorCode::UnsupportedFormat, "video frames smaller than 16x16");
    }
    const double ts = capture.get(cv::CAP_PROP_POS_MSEC);
    std::vector<std::uint8_t> luma(static_cast<std::size_t>(bgr.cols) * bgr.rows);
    const int ch = bgr.channels();
    for (int y = 0; y < bgr.rows; ++y) {
      const std::uint8_t* row = bgr.ptr<std::uint8_t>(y);
      for (int x = 0; x < bgr.cols; ++x) {
        const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
        luma[static_cast<std::size_t>(y) * bgr.cols + x] =
            ch == 1 ? px[0] : bt601_luma(px[2], px[1], px[0]);
      }
    }
    GrayFrame frame(frames.size(), {bgr.cols, bgr.rows}, std::move(luma), ts);
    if (!native) native = frame.size();
    if (frame.size() != *native) {
      throw Error(ErrorCode::CorruptStream, "video changes resolution mid-stream");
    }
    frames.push_back(target ? resize_bilinear(frame, *target) : std::move(frame));
  }
  if (frames.empty()) {
    throw Error(ErrorCode::CorruptStream, "video stream " + source_id + " has no frames");
  }
  if (declared > 0 && static_cast<long long>(frames.size()) < declared) {
    throw Error(ErrorCode::CorruptStream,
                "video stream " + source_id + " ended after " +
                    std::to_string(frames.size()) + " of " +
                    std::to_string(declared) + " frames");
  }
  return FrameSequence(std::move(frames), source_id, fps);
}

std::vector<std::uint8_t> read_head(const fs::path& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::uint8_t> head(n);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(n));
  head.resize(static_cast<std::size_t>(in.gcount()));
  return head;
}

}  // namespace

ContainerKind sniff_container(std::span<const std::uint8_t> head) noexcept {
  if (head.size() >= 12 && std::memcmp(head.data() + 4, "ftyp", 4) == 0) {
    return ContainerKind::Mp4;
  }
  if (looks_like_tar(head)) return ContainerKind::FrameArchive;
  return ContainerKind::Unknown;
}

FrameSequence decode_video(const fs::path& source, std::optional<Size> target) {
  std::error_code ec;
  const auto status = fs::status(source, ec);
  if (ec || !fs::exists(status)) {
    throw Error(ErrorCode::NotFound, "no such file or directory: " + source.string());
  }
  if (fs::is_directory(status)) return decode_frame_directory(source, target);

  const auto id = source.stem().string();
  switch (sniff_container(read_head(source, 512))) {
    case ContainerKind::Mp4:
      return decode_mp4_file(source, id, target);
    case ContainerKind::FrameArchive:
      return decode_archive(read_file(source), id, target);
    case ContainerKind::Unknown:
      break;
  }
  throw Error(ErrorCode::UnsupportedFormat,
              source.string() + " is not an MP4, frame archive or frame directory");
}

FrameSequence decode_video(std::span<const std::uint8_t> bytes,
                           const std::string& source_id,
                           std::optional<Size> target) {
  switch (sniff_container(bytes)) {
    case ContainerKind::FrameArchive:
      return decode_archive(bytes, source_id, target);
    case ContainerKind::Mp4: {
      // FFmpeg needs a seekable file.
      static std::atomic<std::uint64_t> counter{0};
      const auto tmp = fs::temp_directory_path() /
                       ("natalia-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter.fetch_add(1)) + ".mp4");
      write_file(tmp, bytes);
      struct Cleanup {
        fs::path p;
        ~Cleanup() {
          std::error_code ignored;
          fs::remove(p, ignored);
        }
      } cleanup{tmp};
      return decode_mp4_file(tmp, source_id, target);
    }
    case ContainerKind::Unknown:
      break;
  }
  throw Error(ErrorCode::UnsupportedFormat,
              "payload is not an MP4 or frame archive");
}

}  // namespace natalia::media
