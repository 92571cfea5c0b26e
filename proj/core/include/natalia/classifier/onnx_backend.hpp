#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "natalia/classifier/backend.hpp"

namespace natalia::classifier {

/// Graph signature read straight from the ONNX protobuf. Dynamic dimensions
/// are std::nullopt.
struct OnnxSignature {
  struct Tensor {
    std::string name;
    std::vector<std::optional<std::int64_t>> dims;
  };
  std::vector<Tensor> inputs;   // initializers excluded
  std::vector<Tensor> outputs;
  std::int64_t opset = 0;
};

/// Throws Error{BackendFailure} if the bytes are not a parseable ModelProto.
OnnxSignature inspect_onnx(std::span<const std::uint8_t> model);

/// Runs an exported classifier through OpenCV's dnn module.
///
/// Preprocessing: grayscale frame at input_size -> scale to [0, 1] ->
/// replicate to the model's channel count. Logits go through softmax here.
class OnnxBackend final : public ClassifierBackend {
 public:
  static std::unique_ptr<OnnxBackend> load(const std::filesystem::path& path);
  ~OnnxBackend() override;

  const std::string& name() const noexcept override { return name_; }
  media::Size input_size() const noexcept override { return input_size_; }
  int channels() const noexcept { return channels_; }

  Prediction classify(const media::GrayFrame& frame) override;
  std::vector<Prediction> classify_batch(
      std::span<const media::GrayFrame> frames) override;

 private:
  struct Impl;
  OnnxBackend(std::string name, media::Size input_size, int channels,
              std::unique_ptr<Impl> impl);

  std::string name_;
  media::Size input_size_;
  int channels_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace natalia::classifier
