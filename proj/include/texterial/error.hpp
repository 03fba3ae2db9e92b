#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texterial {

enum class ErrorCode {
  InvalidArgument,
  BlankInput,
  NoCollision,
  NoTarget,
  DegenerateSplit,
  MisalignedRange,
  EmptyCompletion,
  MissingSlot,
  UnknownTemplate,
  ProviderTimeout,
  ProviderError,
  MalformedJson,
  LengthViolation,
  CardinalityViolation,
  Busy,
  NothingToUndo,
  NothingToRedo,
  UnknownBlock,
  UnknownFern,
  UnknownLeaf,
  AlreadyPruned,
  InvalidState,
  SameFern,
  TooFewLeaves,
  UnknownSession,
  IoError,
  CorruptFile,
  HashMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the engine surfaces as an Error carrying a stable code.
/// The HTTP layer maps codes to status values; the CLI maps them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  explicit Error(ErrorCode code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace texterial
