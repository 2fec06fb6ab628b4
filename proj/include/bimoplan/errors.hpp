#pragma once

#include <stdexcept>
#include <string>

namespace bimoplan {

enum class ErrorCode {
  ParseError,
  SchemaError,
  DuplicateHand,
  EmptyOverlap,
  GapTooLong,
  LengthMismatch,
  UnknownElement,
  WindowOutOfRange,
  MalformedGraph,
  FrameMismatch,
  UnclassifiableTopology,
  NotSequential,
  OrphanOO,
  MalformedP,
  MissingGraspOffsets,
  SchemaViolation,
  UnknownActionName,
  TickBudgetExhausted,
  GraspOutOfReach,
  ConfigError,
  IoError,
  InvalidArgument,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateHand: return "DuplicateHand";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::GapTooLong: return "GapTooLong";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::MalformedGraph: return "MalformedGraph";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::UnclassifiableTopology: return "UnclassifiableTopology";
    case ErrorCode::NotSequential: return "NotSequential";
    case ErrorCode::OrphanOO: return "OrphanOO";
    case ErrorCode::MalformedP: return "MalformedP";
    case ErrorCode::MissingGraspOffsets: return "MissingGraspOffsets";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnknownActionName: return "UnknownActionName";
    case ErrorCode::TickBudgetExhausted: return "TickBudgetExhausted";
    case ErrorCode::GraspOutOfReach: return "GraspOutOfReach";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bimoplan
