#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace methlib {

/// Every failure the engine reports maps to exactly one of these codes.
/// The string form (see code_name) is part of the HTTP and CLI contract.
enum class ErrorCode {
  SyntaxError,
  UnknownFactor,
  UnknownProperty,
  OutOfDomain,
  EmptyName,
  UnknownId,
  SelfLoop,
  DuplicateRelation,
  DuplicateId,
  InvalidSituation,
  InvalidDefinition,
  InvalidAnswer,
  NotAtLeaf,
  WalkFinished,
  DanglingReference,
  InvalidLibrary,
  MissingAnswer,
  UnscreenedDocument,
  RejectedDocument,
  MalformedFile,
  UnsupportedVersion,
  InvalidRequest,
  IoError,
};

std::string_view code_name(ErrorCode code);

/// Location inside a DSL string or a file. Offsets are byte offsets.
struct Position {
  std::size_t offset = 0;
  std::size_t line = 0;    // 1-based, 0 when not tracked
  std::size_t column = 0;  // 1-based, 0 when not tracked

  bool operator==(const Position&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::optional<Position> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<Position>& position() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::optional<Position> where_;
};

}  // namespace methlib
