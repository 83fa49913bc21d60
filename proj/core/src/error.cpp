#include "mixed_reward/error.hpp"

#include <utility>

namespace mixed_reward {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyId: return "EmptyId";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NoResponses: return "NoResponses";
    case ErrorCode::InvalidGroundTruth: return "InvalidGroundTruth";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::JsonSyntax: return "JsonSyntax";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::VocabSizeMismatch: return "VocabSizeMismatch";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::ZeroMeanVector: return "ZeroMeanVector";
    case ErrorCode::InvalidTokenId: return "InvalidTokenId";
    case ErrorCode::EmbedderUnavailable: return "EmbedderUnavailable";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_semantic(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyId:
    case ErrorCode::TypeMismatch:
    case ErrorCode::NoResponses:
    case ErrorCode::InvalidGroundTruth:
    case ErrorCode::DuplicateId:
    case ErrorCode::GroupTooSmall:
    case ErrorCode::DegenerateGroup:
    case ErrorCode::NonFiniteValue:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, std::string message, std::optional<std::size_t> line,
             std::optional<std::string> field)
    : std::runtime_error(std::move(message)), code_(code), line_(line), field_(std::move(field)) {}

}  // namespace mixed_reward
