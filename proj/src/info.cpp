#include "infoiter/info.hpp"

#include <cmath>
#include <string>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

double neg_log(double p, LogBase base) {
  // -log2(1) and -log(1) are +0.0 after negation only if we avoid -0.0.
  if (p == 1.0) return 0.0;
  return base == LogBase::Bits ? -std::log2(p) : -std::log(p);
}

}  // namespace

std::string_view log_base_name(LogBase base) {
  return base == LogBase::Bits ? "bits" : "nats";
}

LogBase parse_log_base(std::string_view text) {
  if (text == "bits" || text == "2") return LogBase::Bits;
  if (text == "nats" || text == "e") return LogBase::Nats;
  throw Error(ErrorCode::InvalidRequest, "unknown log base '" + std::string(text) + "'");
}

ProbabilityAssessment::ProbabilityAssessment(double p_expected) : p_(p_expected) {
  if (!(p_expected > 0.5 && p_expected < 1.0)) {
    throw Error(ErrorCode::InvalidAssessment,
                "probability assessment must satisfy 0.5 < p < 1, got " + std::to_string(p_expected));
  }
}

double gain_for_probability(double p, LogBase base) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::DomainError, "probability must lie in (0, 1], got " + std::to_string(p));
  }
  return neg_log(p, base);
}

double observed_gain(bool event_in_expected, const ProbabilityAssessment& assessment, LogBase base) {
  return event_in_expected ? neg_log(assessment.p_expected(), base)
                           : neg_log(assessment.p_anomaly(), base);
}

double expected_gain(const ProbabilityAssessment& assessment, LogBase base) {
  const double p = assessment.p_expected();
  const double q = assessment.p_anomaly();
  return p * neg_log(p, base) + q * neg_log(q, base);
}

double anomaly_gain(const ProbabilityAssessment& assessment, LogBase base) {
  return neg_log(assessment.p_anomaly(), base);
}

double cross_entropy_gain(double p_true, const ProbabilityAssessment& assessment, LogBase base) {
  if (!(p_true > 0.0 && p_true < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "true event probability must lie in (0, 1), got " + std::to_string(p_true));
  }
  return p_true * neg_log(assessment.p_expected(), base) +
         (1.0 - p_true) * neg_log(assessment.p_anomaly(), base);
}

double calibration_drift(double p_true, const ProbabilityAssessment& assessment, LogBase base) {
  return cross_entropy_gain(p_true, assessment, base) - expected_gain(assessment, base);
}

}  // namespace infoiter
