#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace natalia {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  // media
  UnsupportedFormat,
  CorruptStream,
  DimensionMismatch,
  DegenerateVariance,
  // classifier
  ModelNotFound,
  ShapeMismatch,
  SizeMismatch,
  BackendFailure,
  // keyframes / dataset
  IndexOutOfRange,
  AlreadySplit,
  SchemaViolation,
  // metrics
  EmptyMatrix,
  EmptyInput,
  // service
  PayloadTooLarge,
  EmptyPayload,
  UnknownOperator,
  StorageFailure,
  InvalidState,
  Unauthorized,
  Forbidden,
  AlreadyReviewed,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace natalia
