#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "infoiter/errors.hpp"
#include "infoiter/info.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace infoiter;

namespace {

// p_hat = 0.501, 0.502, ..., 0.999
std::vector<double> grid() {
  std::vector<double> g;
  for (int k = 501; k <= 999; ++k) g.push_back(k / 1000.0);
  return g;
}

}  // namespace

TEST(GainForProbability, Examples) {
  EXPECT_EQ(gain_for_probability(1.0), 0.0);
  EXPECT_NEAR(gain_for_probability(0.05), oracle::kM95, 1e-12);
  EXPECT_EQ(gain_for_probability(0.25), 2.0);
}

TEST(GainForProbability, DomainErrors) {
  expect_code(ErrorCode::DomainError, [] { gain_for_probability(0.0); });
  expect_code(ErrorCode::DomainError, [] { gain_for_probability(-0.1); });
  expect_code(ErrorCode::DomainError, [] { gain_for_probability(1.0000001); });
  expect_code(ErrorCode::DomainError,
              [] { gain_for_probability(std::numeric_limits<double>::quiet_NaN()); });
}

TEST(Assessment, StrictBounds) {
  expect_code(ErrorCode::InvalidAssessment, [] { ProbabilityAssessment(0.5); });
  expect_code(ErrorCode::InvalidAssessment, [] { ProbabilityAssessment(1.0); });
  expect_code(ErrorCode::InvalidAssessment, [] { ProbabilityAssessment(0.4); });
  expect_code(ErrorCode::InvalidAssessment, [] { ProbabilityAssessment(1.2); });
  expect_code(ErrorCode::InvalidAssessment,
              [] { ProbabilityAssessment(std::numeric_limits<double>::quiet_NaN()); });
  ProbabilityAssessment a(0.95);
  EXPECT_EQ(a.p_expected(), 0.95);
  EXPECT_NEAR(a.p_anomaly(), 0.05, 1e-15);
}

TEST(ObservedGain, Examples) {
  EXPECT_NEAR(observed_gain(true, ProbabilityAssessment(0.95)), oracle::kG95In, 1e-12);
  EXPECT_NEAR(observed_gain(false, ProbabilityAssessment(0.95)), oracle::kM95, 1e-12);
  EXPECT_NEAR(observed_gain(false, ProbabilityAssessment(0.99)), oracle::kM99, 1e-12);
}

TEST(ExpectedGain, Examples) {
  EXPECT_NEAR(expected_gain(ProbabilityAssessment(0.95)), oracle::kH95, 1e-12);
  EXPECT_NEAR(expected_gain(ProbabilityAssessment(0.99)), oracle::kH99, 1e-12);
  // Supremum 1 at 0.5 is approached but never reached.
  double near_half = expected_gain(ProbabilityAssessment(0.500001));
  EXPECT_LT(near_half, 1.0);
  EXPECT_GT(near_half, 0.999999);
}

TEST(AnomalyGain, Examples) {
  EXPECT_NEAR(anomaly_gain(ProbabilityAssessment(0.95)), oracle::kM95, 1e-12);
  EXPECT_NEAR(anomaly_gain(ProbabilityAssessment(0.99)), oracle::kM99, 1e-12);
  EXPECT_EQ(anomaly_gain(ProbabilityAssessment(0.75)), 2.0);
}

TEST(CrossEntropy, Examples) {
  ProbabilityAssessment a(0.95);
  EXPECT_NEAR(cross_entropy_gain(0.95, a), oracle::kH95, 1e-12);
  EXPECT_NEAR(cross_entropy_gain(0.80, a), oracle::kCross80_95, 1e-12);
  EXPECT_NEAR(cross_entropy_gain(0.5, ProbabilityAssessment(0.75)), oracle::kCross50_75, 1e-12);
  EXPECT_NEAR(calibration_drift(0.80, a), oracle::kDrift80_95, 1e-12);
}

TEST(CrossEntropy, DomainErrors) {
  ProbabilityAssessment a(0.9);
  expect_code(ErrorCode::DomainError, [&] { cross_entropy_gain(0.0, a); });
  expect_code(ErrorCode::DomainError, [&] { cross_entropy_gain(1.0, a); });
  expect_code(ErrorCode::DomainError, [&] { cross_entropy_gain(-0.3, a); });
}

TEST(GainProperties, PositivityAndFiniteness) {
  for (double p : grid()) {
    ProbabilityAssessment a(p);
    for (bool in : {true, false}) {
      double g = observed_gain(in, a);
      EXPECT_GT(g, 0.0) << p;
      EXPECT_TRUE(std::isfinite(g)) << p;
    }
  }
}

TEST(GainProperties, AnomalyDominance) {
  for (double p : grid()) {
    EXPECT_GT(anomaly_gain(ProbabilityAssessment(p)), gain_for_probability(p)) << p;
  }
}

TEST(GainProperties, Monotonicity) {
  auto g = grid();
  for (std::size_t i = 1; i < g.size(); ++i) {
    ProbabilityAssessment lo(g[i - 1]), hi(g[i]);
    EXPECT_GT(expected_gain(lo), expected_gain(hi)) << g[i];
    EXPECT_LT(anomaly_gain(lo), anomaly_gain(hi)) << g[i];
  }
}

TEST(GainProperties, Decomposition) {
  for (double p : grid()) {
    ProbabilityAssessment a(p);
    double mix = p * observed_gain(true, a) + (1 - p) * observed_gain(false, a);
    EXPECT_NEAR(expected_gain(a), mix, 1e-12) << p;
  }
}

TEST(GainProperties, BaseConversion) {
  const double log2e = std::log2(std::exp(1.0));
  for (double p : grid()) {
    ProbabilityAssessment a(p);
    EXPECT_NEAR(expected_gain(a, LogBase::Nats) * log2e, expected_gain(a, LogBase::Bits), 1e-12);
    EXPECT_NEAR(anomaly_gain(a, LogBase::Nats) * log2e, anomaly_gain(a, LogBase::Bits), 1e-12);
    EXPECT_NEAR(observed_gain(true, a, LogBase::Nats) * log2e, observed_gain(true, a), 1e-12);
  }
  EXPECT_NEAR(expected_gain(ProbabilityAssessment(0.95), LogBase::Nats), oracle::kH95Nats, 1e-12);
}

TEST(GainProperties, CalibrationIdentity) {
  for (double p_hat : {0.55, 0.7, 0.95, 0.999}) {
    ProbabilityAssessment a(p_hat);
    EXPECT_EQ(calibration_drift(p_hat, a), cross_entropy_gain(p_hat, a) - expected_gain(a));
    EXPECT_NEAR(calibration_drift(p_hat, a), 0.0, 1e-15);
    for (int k = 1; k < 100; ++k) {
      double p = k / 100.0;
      double closed = (p_hat - p) * std::log2(p_hat / (1 - p_hat));
      double drift = cross_entropy_gain(p, a) - expected_gain(a);
      EXPECT_NEAR(drift, closed, 1e-12) << p << " " << p_hat;
      if (p < p_hat) {
        EXPECT_GT(drift, 0.0);
      }
      if (p > p_hat) {
        EXPECT_LT(drift, 0.0);
      }
    }
  }
}

TEST(LogBase, Parsing) {
  EXPECT_EQ(parse_log_base("bits"), LogBase::Bits);
  EXPECT_EQ(parse_log_base("nats"), LogBase::Nats);
  EXPECT_EQ(log_base_name(LogBase::Nats), "nats");
  expect_code(ErrorCode::InvalidRequest, [] { parse_log_base("dits"); });
}
