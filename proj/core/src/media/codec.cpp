#include "natalia/media/codec.hpp"

#include <fstream>
#include <iterator>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "natalia/common/error.hpp"

namespace natalia::media {

std::vector<std::uint8_t> encode_png(const GrayFrame& frame) {
  const cv::Mat view(frame.height(), frame.width(), CV_8UC1,
                     const_cast<std::uint8_t*>(frame.pixels().data()));
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", view, out)) {
    throw Error(ErrorCode::StorageFailure, "PNG encoding failed");
  }
  return out;
}

GrayFrame decode_png(std::span<const std::uint8_t> bytes, std::size_t index) {
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat img;
  try {
    img = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::CorruptStream, std::string("image decode: ") + e.what());
  }
  if (img.empty()) {
    throw Error(ErrorCode::CorruptStream, "image could not be decoded");
  }
  if (img.depth() != CV_8U) {
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit images are supported");
  }
  if (img.cols < kMinFrameSide || img.rows < kMinFrameSide) {
    throw Error(ErrorCode::UnsupportedFormat, "image smaller than 16x16");
  }
  const int channels = img.channels();
  std::vector<std::uint8_t> luma(static_cast<std::size_t>(img.cols) * img.rows);
  for (int y = 0; y < img.rows; ++y) {
    const std::uint8_t* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      std::uint8_t v;
      if (channels <= 2) {
        v = px[0];
      } else {
        v = bt601_luma(px[2], px[1], px[0]);  // OpenCV stores BGR(A)
      }
      luma[static_cast<std::size_t>(y) * img.cols + x] = v;
    }
  }
  return GrayFrame(index, {img.cols, img.rows}, std::move(luma));
}

void write_png(const std::filesystem::path& path, const GrayFrame& frame) {
  write_file(path, encode_png(frame));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + path.string());
}

}  // namespace natalia::media
