#include "natalia/common/error.hpp"

namespace natalia {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptStream: return "CorruptStream";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::ModelNotFound: return "ModelNotFound";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::AlreadySplit: return "AlreadySplit";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::AlreadyReviewed: return "AlreadyReviewed";
  }
  return "Unknown";
}

}  // namespace natalia
