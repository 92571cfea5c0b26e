#include "natalia/classifier/onnx_backend.hpp"

#include <algorithm>
#include <set>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "natalia/media/codec.hpp"

namespace natalia::classifier {
namespace {

inline constexpr int kDefaultSide = 224;

// Just enough protobuf wire-format decoding to read ModelProto.graph
// inputs/outputs and opset_import.
class WireReader {
 public:
  explicit WireReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const noexcept { return pos_ >= bytes_.size(); }

  std::uint64_t varint() {
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= bytes_.size()) fail("truncated varint");
      const auto b = bytes_[pos_++];
      value |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return value;
    }
    fail("varint too long");
  }

  std::span<const std::uint8_t> bytes() {
    const auto len = varint();
    if (len > bytes_.size() - pos_) fail("length-delimited field overruns buffer");
    auto out = bytes_.subspan(pos_, static_cast<std::size_t>(len));
    pos_ += static_cast<std::size_t>(len);
    return out;
  }

  void skip(int wire_type) {
    switch (wire_type) {
      case 0: varint(); return;
      case 1: advance(8); return;
      case 2: bytes(); return;
      case 5: advance(4); return;
      default: fail("unsupported wire type " + std::to_string(wire_type));
    }
  }

  [[noreturn]] static void fail(const std::string& why) {
    throw Error(ErrorCode::BackendFailure, "not a valid ONNX model: " + why);
  }

 private:
  void advance(std::size_t n) {
    if (n > bytes_.size() - pos_) fail("truncated fixed-width field");
    pos_ += n;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename OnField>
void for_each_field(std::span<const std::uint8_t> message, OnField&& on_field) {
  WireReader r(message);
  while (!r.done()) {
    const auto key = r.varint();
    const auto field = static_cast<std::uint32_t>(key >> 3);
    const auto wire = static_cast<int>(key & 7);
    on_field(field, wire, r);
  }
}

std::string as_string(std::span<const std::uint8_t> b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::optional<std::int64_t> parse_dimension(std::span<const std::uint8_t> msg) {
  std::optional<std::int64_t> value;
  for_each_field(msg, [&](std::uint32_t f, int w, WireReader& r) {
    if (f == 1 && w == 0) {
      value = static_cast<std::int64_t>(r.varint());
    } else {
      r.skip(w);  // dim_param and denotation mean "dynamic"
    }
  });
  return value;
}

OnnxSignature::Tensor parse_value_info(std::span<const std::uint8_t> msg) {
  OnnxSignature::Tensor t;
  for_each_field(msg, [&](std::uint32_t f, int w, WireReader& r) {
    if (f == 1 && w == 2) {
      t.name = as_string(r.bytes());
    } else if (f == 2 && w == 2) {  // TypeProto
      for_each_field(r.bytes(), [&](std::uint32_t tf, int tw, WireReader& tr) {
        if (tf != 1 || tw != 2) return tr.skip(tw);  // tensor_type
        for_each_field(tr.bytes(), [&](std::uint32_t sf, int sw, WireReader& sr) {
          if (sf != 2 || sw != 2) return sr.skip(sw);  // shape
          for_each_field(sr.bytes(), [&](std::uint32_t df, int dw, WireReader& dr) {
            if (df != 1 || dw != 2) return dr.skip(dw);
            t.dims.push_back(parse_dimension(dr.bytes()));
          });
        });
      });
    } else {
      r.skip(w);
    }
  });
  return t;
}

std::string initializer_name(std::span<const std::uint8_t> tensor) {
  std::string name;
  for_each_field(tensor, [&](std::uint32_t f, int w, WireReader& r) {
    if (f == 8 && w == 2) {
      name = as_string(r.bytes());
    } else {
      r.skip(w);
    }
  });
  return name;
}

}  // namespace

OnnxSignature inspect_onnx(std::span<const std::uint8_t> model) {
  OnnxSignature sig;
  bool have_graph = false;
  for_each_field(model, [&](std::uint32_t f, int w, WireReader& r) {
    if (f == 7 && w == 2) {
      have_graph = true;
      std::vector<OnnxSignature::Tensor> inputs;
      std::set<std::string> initializers;
      for_each_field(r.bytes(), [&](std::uint32_t gf, int gw, WireReader& gr) {
        if (gf == 11 && gw == 2) {
          inputs.push_back(parse_value_info(gr.bytes()));
        } else if (gf == 12 && gw == 2) {
          sig.outputs.push_back(parse_value_info(gr.bytes()));
        } else if (gf == 5 && gw == 2) {
          initializers.insert(initializer_name(gr.bytes()));
        } else {
          gr.skip(gw);
        }
      });
      for (auto& in : inputs) {
        if (!initializers.contains(in.name)) sig.inputs.push_back(std::move(in));
      }
    } else if (f == 8 && w == 2) {  // OperatorSetIdProto
      std::string domain;
      std::int64_t version = 0;
      for_each_field(r.bytes(), [&](std::uint32_t of, int ow, WireReader& orr) {
        if (of == 1 && ow == 2) {
          domain = as_string(orr.bytes());
        } else if (of == 2 && ow == 0) {
          version = static_cast<std::int64_t>(orr.varint());
        } else {
          orr.skip(ow);
        }
      });
      if (domain.empty() || domain == "ai.onnx") sig.opset = std::max(sig.opset, version);
    } else {
      r.skip(w);
    }
  });
  if (!have_graph) WireReader::fail("no graph");
  return sig;
}

struct OnnxBackend::Impl {
  cv::dnn::Net net;
};

OnnxBackend::OnnxBackend(std::string name, media::Size input_size, int channels,
                         std::unique_ptr<Impl> impl)
    : name_(std::move(name)),
      input_size_(input_size),
      channels_(channels),
      impl_(std::move(impl)) {}

OnnxBackend::~OnnxBackend() = default;

std::unique_ptr<OnnxBackend> OnnxBackend::load(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::ModelNotFound, "model file not found: " + path.string());
  }
  const auto bytes = media::read_file(path);
  const auto sig = inspect_onnx(bytes);

  if (sig.inputs.size() != 1 || sig.outputs.size() != 1) {
    throw Error(ErrorCode::ShapeMismatch,
                "model must have exactly one input and one output");
  }
  const auto& out = sig.outputs.front();
  if (out.dims.size() != 2 || out.dims[1] != 6) {
    std::string got = "[";
    for (std::size_t i = 0; i < out.dims.size(); ++i) {
      got += (i ? "," : "") + (out.dims[i] ? std::to_string(*out.dims[i]) : "?");
    }
    throw Error(ErrorCode::ShapeMismatch,
                "output must be N x 6 logits, model declares " + got + "]");
  }
  const auto& in = sig.inputs.front();
  if (in.dims.size() != 4 || !in.dims[1] || *in.dims[1] < 1) {
    throw Error(ErrorCode::ShapeMismatch,
                "input must be N x C x H x W with a fixed channel count");
  }
  const int channels = static_cast<int>(*in.dims[1]);
  const int height = in.dims[2] ? static_cast<int>(*in.dims[2]) : kDefaultSide;
  const int width = in.dims[3] ? static_cast<int>(*in.dims[3]) : kDefaultSide;

  auto impl = std::make_unique<Impl>();
  try {
    impl->net = cv::dnn::readNetFromONNX(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size());
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::BackendFailure, std::string("model import: ") + e.what());
  }
  if (impl->net.empty()) {
    throw Error(ErrorCode::BackendFailure, "model import produced an empty network");
  }
  impl->net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  impl->net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
  return std::unique_ptr<OnnxBackend>(new OnnxBackend(
      "model:" + path.stem().string(), {width, height}, channels, std::move(impl)));
}

Prediction OnnxBackend::classify(const media::GrayFrame& frame) {
  return classify_batch(std::span<const media::GrayFrame>(&frame, 1)).front();
}

std::vector<Prediction> OnnxBackend::classify_batch(
    std::span<const media::GrayFrame> frames) {
  if (frames.empty()) return {};
  for (const auto& f : frames) {
    try {
      require_input_size(f);
    } catch (const Error& e) {
      throw FrameError(e.code(), f.index(), e.what());
    }
  }
  const int n = static_cast<int>(frames.size());
  const int plane = input_size_.width * input_size_.height;
  const int dims[] = {n, channels_, input_size_.height, input_size_.width};
  cv::Mat blob(4, dims, CV_32F);
  auto* data = blob.ptr<float>();
  for (int i = 0; i < n; ++i) {
    const auto px = frames[static_cast<std::size_t>(i)].pixels();
    for (int c = 0; c < channels_; ++c) {
      float* dst = data + (static_cast<std::ptrdiff_t>(i) * channels_ + c) * plane;
      for (int p = 0; p < plane; ++p) dst[p] = static_cast<float>(px[p]) / 255.0f;
    }
  }

  cv::Mat logits;
  try {
    impl_->net.setInput(blob);
    logits = impl_->net.forward();
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::BackendFailure, std::string("inference: ") + e.what());
  }
  if (logits.total() != static_cast<std::size_t>(n) * kLabelCount) {
    throw Error(ErrorCode::ShapeMismatch, "model produced " +
                                              std::to_string(logits.total()) +
                                              " values for a batch of " +
                                              std::to_string(n));
  }
  const float* row = logits.ptr<float>();
  std::vector<Prediction> out;
  out.reserve(frames.size());
  for (int i = 0; i < n; ++i) {
    std::array<double, kLabelCount> z{};
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      z[k] = row[static_cast<std::size_t>(i) * kLabelCount + k];
    }
    out.push_back(Prediction::from_probs(frames[static_cast<std::size_t>(i)].index(),
                                         softmax(z)));
  }
  return out;
}

}  // namespace natalia::classifier
