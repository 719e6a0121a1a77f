#include "infoiter/errors.hpp"

namespace infoiter {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidAssessment: return "InvalidAssessment";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::InvalidExpectedSet: return "InvalidExpectedSet";
    case ErrorCode::ModelViolation: return "ModelViolation";
    case ErrorCode::SetSyntaxError: return "SetSyntaxError";
    case ErrorCode::IngestError: return "IngestError";
    case ErrorCode::ParamError: return "ParamError";
    case ErrorCode::ToolDomainError: return "ToolDomainError";
    case ErrorCode::ToolContractError: return "ToolContractError";
    case ErrorCode::GenError: return "GenError";
    case ErrorCode::ReplayError: return "ReplayError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
  }
  return "Unknown";
}

}  // namespace infoiter
