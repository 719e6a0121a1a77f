#pragma once

// Monte Carlo check of whether a tool discriminates between two hypotheses:
// the tool is informative when its expected output differs across them.
// Expectations are estimated from replicate datasets and compared with a
// Welch two-sample test; label-valued outputs are compared through their
// category frequencies with a chi-square test of homogeneity.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infoiter/generators.hpp"
#include "infoiter/tools.hpp"

namespace infoiter {

struct WelchResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t = 0.0;
  double df = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
};

/// Two-sided Welch test. Both samples need at least two values. When both
/// variances are zero the p-value is 1 for equal means and 0 otherwise.
WelchResult welch_test(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Homogeneity test on a 2 x k table of category counts.
ChiSquareResult chi_square_homogeneity(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b);

struct InformativenessOptions {
  std::size_t n_replicates = 1000;
  double alpha = 0.01;
  std::uint64_t seed = 0;
};

struct InformativenessVerdict {
  bool informative = false;
  double mean_h1 = 0.0;
  double mean_h2 = 0.0;
  /// Welch: |mean_h1 - mean_h2| minus the (1 - alpha) confidence half-width
  /// of the difference. Chi-square: statistic minus its critical value.
  /// Positive exactly when the test rejects at level alpha.
  double ci_separation = 0.0;
  double p_value = 1.0;
  std::size_t n_replicates = 0;
  std::string method;
};

/// Throws ParamError for n_replicates < 100 or alpha outside (0, 1), and
/// GenError when a generator fails.
InformativenessVerdict informativeness_check(const ToolSpec& tool, const HypothesisGenerator& h1,
                                             const HypothesisGenerator& h2,
                                             const InformativenessOptions& options = {});

}  // namespace infoiter
