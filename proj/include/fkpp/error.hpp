#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkpp {

enum class ErrorCode {
  NonPositiveCoefficient,
  ExponentOrderViolation,
  InvalidGrid,
  GridMismatch,
  InvalidProfile,
  EvaluatedAtOrPastBlowup,
  NoBlowup,
  InvalidInitial,
  MissingEvent,
  RegimeViolation,
  NegativeRadicand,
  DomainTooSmall,
  InvalidConfig,
  NonFiniteState,
  NegativeInput,
  InsufficientWindow,
  WrongRegime,
  NotOrdered,
  KappaOnWrongSide,
  BoundCollapse,
  SampleOutsideProfile,
  BadBracket,
  ParseError,
  UnknownKey,
  MissingKey,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fkpp
