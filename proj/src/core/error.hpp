#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace codepoison {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedLine,
  MissingField,
  BadLabel,
  DuplicateIdx,
  DanglingReference,
  ParseFailed,
  InvalidTrigger,
  EmptyCatalog,
  NotVictim,
  NoEligibleSamples,
  PoisonShortfall,
  MissingPrediction,
  UnknownIdx,
  DuplicatePrediction,
  LengthMismatch,
  EmptyInput,
  MalformedManifest,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the core carries one of the codes above. `line` is
/// the 1-based input line when the error is tied to one, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace codepoison
