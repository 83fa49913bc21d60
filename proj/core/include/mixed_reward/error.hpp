#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mixed_reward {

enum class ErrorCode {
  // sample validation
  EmptyId,
  TypeMismatch,
  NoResponses,
  InvalidGroundTruth,
  DuplicateId,
  // JSONL ingestion
  JsonSyntax,
  SchemaViolation,
  // embedding table / embedder
  Io,
  BadMagic,
  HeaderMismatch,
  ZeroNormRow,
  VocabSizeMismatch,
  DuplicateToken,
  EmptySequence,
  ZeroMeanVector,
  InvalidTokenId,
  EmbedderUnavailable,
  // advantage / objective math
  GroupTooSmall,
  DegenerateGroup,
  NonFiniteValue,
  Overflow,
  // configuration
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by the content of a sample rather than its encoding.
bool is_semantic(ErrorCode code) noexcept;

/// Structured engine error. `line` is set for JSONL ingestion errors
/// (1-based), `field` for schema violations.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<std::size_t> line = std::nullopt,
        std::optional<std::string> field = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& line() const noexcept { return line_; }
  const std::optional<std::string>& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::optional<std::string> field_;
};

}  // namespace mixed_reward
