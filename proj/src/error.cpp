#include "fkpp/error.hpp"

namespace fkpp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::ExponentOrderViolation: return "ExponentOrderViolation";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::EvaluatedAtOrPastBlowup: return "EvaluatedAtOrPastBlowup";
    case ErrorCode::NoBlowup: return "NoBlowup";
    case ErrorCode::InvalidInitial: return "InvalidInitial";
    case ErrorCode::MissingEvent: return "MissingEvent";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::InsufficientWindow: return "InsufficientWindow";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::NotOrdered: return "NotOrdered";
    case ErrorCode::KappaOnWrongSide: return "KappaOnWrongSide";
    case ErrorCode::BoundCollapse: return "BoundCollapse";
    case ErrorCode::SampleOutsideProfile: return "SampleOutsideProfile";
    case ErrorCode::BadBracket: return "BadBracket";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace fkpp
