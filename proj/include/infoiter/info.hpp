#pragma once

// Shannon information accounting for a single analytic step.
//
// An analyst splits the outcome space of a tool into an expected set E and
// its complement, and assigns P(Y in E) = p_hat with 0.5 < p_hat < 1. Every
// quantity here is a function of p_hat alone:
//
//   observed gain   G  = -log p_hat  (as expected)  or  -log(1 - p_hat)
//   expected gain   H  = binary entropy of p_hat
//   anomaly gain    M  = -log(1 - p_hat), the largest gain available
//
// All functions are pure and thread-safe.

#include <optional>
#include <string>
#include <string_view>

namespace infoiter {

enum class LogBase { Bits, Nats };

std::string_view log_base_name(LogBase base);
LogBase parse_log_base(std::string_view text);

/// The analyst's P(Y in E). Construction enforces 0.5 < p < 1 strictly;
/// boundary values are rejected rather than clamped.
class ProbabilityAssessment {
 public:
  /// Throws Error{InvalidAssessment} outside the open interval (0.5, 1).
  explicit ProbabilityAssessment(double p_expected);

  double p_expected() const noexcept { return p_; }
  double p_anomaly() const noexcept { return 1.0 - p_; }

  friend bool operator==(const ProbabilityAssessment&, const ProbabilityAssessment&) = default;

 private:
  double p_;
};

/// -log(p). Exactly 0 at p == 1. Throws Error{DomainError} unless 0 < p <= 1.
double gain_for_probability(double p, LogBase base = LogBase::Bits);

double observed_gain(bool event_in_expected, const ProbabilityAssessment& assessment,
                     LogBase base = LogBase::Bits);

double expected_gain(const ProbabilityAssessment& assessment, LogBase base = LogBase::Bits);

double anomaly_gain(const ProbabilityAssessment& assessment, LogBase base = LogBase::Bits);

/// Mean observed gain when the event E actually occurs with probability
/// p_true: p_true * -log(p_hat) + (1 - p_true) * -log(1 - p_hat).
/// Throws Error{DomainError} unless 0 < p_true < 1.
double cross_entropy_gain(double p_true, const ProbabilityAssessment& assessment,
                          LogBase base = LogBase::Bits);

/// Per-step drift of S_G - S_H expected under a true event probability:
/// cross_entropy_gain(p_true) - expected_gain.
double calibration_drift(double p_true, const ProbabilityAssessment& assessment,
                         LogBase base = LogBase::Bits);

}  // namespace infoiter
