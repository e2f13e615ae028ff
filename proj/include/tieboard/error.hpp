#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tieboard {

enum class ErrorCode {
  ZeroDimension,
  NonPositiveSpacing,
  TooFewHolesPerRing,
  UnknownHole,
  ConsecutiveDuplicateHole,
  DegenerateShape,
  ReflectionOffGrid,
  TooFewVertices,
  NoUniqueOdd,
  InvalidArgument,
  ModeTargetMismatch,
  MissingAxis,
  InvalidTransition,
  NotInSelectionPhase,
  DimensionMismatch,
  OutOfRange,
  LengthMismatch,
  InvalidPeriod,
  BadToken,
  WrongCount,
  EmptyScript,
  OutOfWorld,
  CatalogError,
  ConfigError,
  ScriptParseError,
  BindError,
  MalformedMessage,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::TooFewHolesPerRing: return "TooFewHolesPerRing";
    case ErrorCode::UnknownHole: return "UnknownHole";
    case ErrorCode::ConsecutiveDuplicateHole: return "ConsecutiveDuplicateHole";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::ReflectionOffGrid: return "ReflectionOffGrid";
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::NoUniqueOdd: return "NoUniqueOdd";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ModeTargetMismatch: return "ModeTargetMismatch";
    case ErrorCode::MissingAxis: return "MissingAxis";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::NotInSelectionPhase: return "NotInSelectionPhase";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidPeriod: return "InvalidPeriod";
    case ErrorCode::BadToken: return "BadToken";
    case ErrorCode::WrongCount: return "WrongCount";
    case ErrorCode::EmptyScript: return "EmptyScript";
    case ErrorCode::OutOfWorld: return "OutOfWorld";
    case ErrorCode::CatalogError: return "CatalogError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ScriptParseError: return "ScriptParseError";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tieboard
