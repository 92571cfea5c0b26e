#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "natalia/classifier/prediction.hpp"
#include "natalia/common/error.hpp"
#include "natalia/media/frame.hpp"

namespace natalia::classifier {

/// Raised by classify_sequence; carries the frame that failed.
class FrameError : public Error {
 public:
  FrameError(ErrorCode code, std::size_t frame_index, const std::string& what)
      : Error(code, "frame " + std::to_string(frame_index) + ": " + what),
        frame_index_(frame_index) {}

  std::size_t frame_index() const noexcept { return frame_index_; }

 private:
  std::size_t frame_index_;
};

/// A fetal-plane classifier. Instances are not thread-safe: one worker owns
/// one backend at a time. classify is deterministic for a fixed instance.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;

  virtual const std::string& name() const noexcept = 0;
  virtual media::Size input_size() const noexcept = 0;

  /// Frame must already be at input_size(); otherwise Error{SizeMismatch}.
  virtual Prediction classify(const media::GrayFrame& frame) = 0;

  /// Batched form. The default loops over classify().
  virtual std::vector<Prediction> classify_batch(
      std::span<const media::GrayFrame> frames);

 protected:
  void require_input_size(const media::GrayFrame& frame) const;
};

/// `mock`, `mock:<W>x<H>` or `model:<path>` (ONNX, N x C x H x W input, N x 6
/// logits output).
///
/// Errors: ModelNotFound, ShapeMismatch (output head is not 6-way),
/// BackendFailure (unreadable model), InvalidArgument (bad descriptor).
std::unique_ptr<ClassifierBackend> load_backend(std::string_view descriptor);

/// One prediction per frame, in order, independent of `batch`.
/// Errors from the backend are rethrown as FrameError.
std::vector<Prediction> classify_sequence(ClassifierBackend& backend,
                                          const media::FrameSequence& seq,
                                          std::size_t batch = 16);

}  // namespace natalia::classifier
