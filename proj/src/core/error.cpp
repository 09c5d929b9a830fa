#include "core/error.hpp"

namespace codepoison {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::DuplicateIdx: return "DuplicateIdx";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::ParseFailed: return "ParseFailed";
    case ErrorCode::InvalidTrigger: return "InvalidTrigger";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::NotVictim: return "NotVictim";
    case ErrorCode::NoEligibleSamples: return "NoEligibleSamples";
    case ErrorCode::PoisonShortfall: return "PoisonShortfall";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::UnknownIdx: return "UnknownIdx";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line != 0) out += " (line " + std::to_string(line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(format_message(code, message, line)), code_(code), line_(line) {}

}  // namespace codepoison
