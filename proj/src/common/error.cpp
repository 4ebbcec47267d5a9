#include "common/error.hpp"

namespace mlfw {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::DeadPrefix: return "DeadPrefix";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::BinUnfillable: return "BinUnfillable";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::BadDistribution: return "BadDistribution";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

}  // namespace mlfw
