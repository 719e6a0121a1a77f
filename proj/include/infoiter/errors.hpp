#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infoiter {

// Error codes are part of the wire contract: the CLI prints them on stderr and
// the HTTP API returns them verbatim in the error envelope.
enum class ErrorCode {
  DomainError,
  InvalidAssessment,
  EmptySpace,
  KindMismatch,
  InvalidExpectedSet,
  ModelViolation,
  SetSyntaxError,
  IngestError,
  ParamError,
  ToolDomainError,
  ToolContractError,
  GenError,
  ReplayError,
  IntegrityError,
  EmptyCandidates,
  SpaceMismatch,
  BaseMismatch,
  NotFound,
  InvalidRequest,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace infoiter
