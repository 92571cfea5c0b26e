#include "natalia/classifier/backend.hpp"

#include <algorithm>
#include <charconv>

#include "natalia/classifier/mock_backend.hpp"
#include "natalia/classifier/onnx_backend.hpp"

namespace natalia::classifier {

std::vector<Prediction> ClassifierBackend::classify_batch(
    std::span<const media::GrayFrame> frames) {
  std::vector<Prediction> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(classify(f));
  return out;
}

void ClassifierBackend::require_input_size(const media::GrayFrame& frame) const {
  const auto want = input_size();
  if (frame.size() != want) {
    throw Error(ErrorCode::SizeMismatch,
                "backend '" + name() + "' expects " + std::to_string(want.width) +
                    "x" + std::to_string(want.height) + ", got " +
                    std::to_string(frame.width()) + "x" +
                    std::to_string(frame.height()));
  }
}

namespace {

std::optional<media::Size> parse_size(std::string_view text) {
  const auto x = text.find('x');
  if (x == std::string_view::npos) return std::nullopt;
  int w = 0, h = 0;
  const auto a = std::from_chars(text.data(), text.data() + x, w);
  const auto b = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
  if (a.ec != std::errc() || a.ptr != text.data() + x || b.ec != std::errc() ||
      b.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return media::Size{w, h};
}

}  // namespace

std::unique_ptr<ClassifierBackend> load_backend(std::string_view descriptor) {
  if (descriptor == "mock") return std::make_unique<MockBackend>();
  if (descriptor.starts_with("mock:")) {
    const auto size = parse_size(descriptor.substr(5));
    if (!size || size->width < media::kMinFrameSide ||
        size->height < media::kMinFrameSide) {
      throw Error(ErrorCode::InvalidArgument,
                  "bad mock size in descriptor '" + std::string(descriptor) + "'");
    }
    return std::make_unique<MockBackend>(*size);
  }
  if (descriptor.starts_with("model:") && descriptor.size() > 6) {
    return OnnxBackend::load(std::string(descriptor.substr(6)));
  }
  throw Error(ErrorCode::InvalidArgument,
              "backend descriptor must be 'mock' or 'model:<path>', got '" +
                  std::string(descriptor) + "'");
}

std::vector<Prediction> classify_sequence(ClassifierBackend& backend,
                                          const media::FrameSequence& seq,
                                          std::size_t batch) {
  if (batch == 0) throw Error(ErrorCode::InvalidArgument, "batch must be >= 1");
  std::vector<Prediction> out;
  out.reserve(seq.size());
  const auto& frames = seq.frames();
  for (std::size_t start = 0; start < frames.size(); start += batch) {
    const std::size_t count = std::min(batch, frames.size() - start);
    const std::span<const media::GrayFrame> chunk(frames.data() + start, count);
    std::vector<Prediction> part;
    try {
      part = backend.classify_batch(chunk);
    } catch (const FrameError&) {
      throw;
    } catch (const Error& e) {
      // Re-run singly to locate the failing frame.
      for (const auto& f : chunk) {
        try {
          backend.classify(f);
        } catch (const Error& single) {
          throw FrameError(single.code(), f.index(), single.what());
        }
      }
      throw FrameError(e.code(), chunk.front().index(), e.what());
    }
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace natalia::classifier
