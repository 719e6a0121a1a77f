#pragma once

// Monte Carlo checks of the information accounting.
//
// Two planes:
//  * abstract: the event "Y in E" is drawn directly with probability p_true,
//    or Y is drawn from an explicit distribution over a finite space;
//  * concrete: datasets come from a hypothesis generator and the tool is
//    applied, exercising the whole stack.
//
// Runs use counter-based seeds (derive_seed(seed, stream, run)) and results
// are accumulated in run-index order, so a report is a pure function of its
// inputs.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoiter/generators.hpp"
#include "infoiter/info.hpp"
#include "infoiter/outcome.hpp"
#include "infoiter/tools.hpp"

namespace infoiter {

struct SimulatedAnalyst {
  std::string analyst_id;
  OutcomeSpace space;
  OutcomeSet expected_set;
  ProbabilityAssessment assessment{0.75};
  LogBase base = LogBase::Bits;

  /// Throws InvalidExpectedSet unless expected_set is a strict subset of space.
  static SimulatedAnalyst make(std::string id, OutcomeSpace space, OutcomeSet expected_set,
                               double p_hat, LogBase base = LogBase::Bits);
};

/// Abstract plane: P(Y in E) = p_true.
struct BernoulliEvent {
  double p_true = 0.5;
};

/// Abstract plane: Y drawn from explicit probabilities over space points.
struct DiscreteOutcomes {
  std::vector<std::pair<ScalarValue, double>> outcomes;
};

/// Concrete plane: Y = T(X) with X drawn from the generator. `p_event` is the
/// analytically known P(Y in E), when available.
struct ConcreteMechanism {
  HypothesisGenerator generator;
  ToolSpec tool;
  std::optional<double> p_event;
};

using TrueMechanism = std::variant<BernoulliEvent, DiscreteOutcomes, ConcreteMechanism>;

struct SimAssertion {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct SimReport {
  std::string kind;
  std::size_t n_runs = 0;
  std::uint64_t seed = 0;

  // Single-analyst gain distribution.
  double mean_g = 0.0;
  double se_g = 0.0;
  std::optional<double> theory_g;
  double event_frequency = 0.0;
  double mean_drift = 0.0;  // (S_G - S_H) / t over the run sequence
  double se_drift = 0.0;
  std::optional<double> theory_drift;
  std::size_t model_violations = 0;

  // Two-analyst runs, indexed by scenario 1..4:
  // 1 A as-expected / B unexpected, 2 A unexpected / B as-expected,
  // 3 both as-expected, 4 both unexpected.
  std::array<std::size_t, 4> scenario_counts{};
  std::size_t gains_differ = 0;
  std::size_t gains_equal = 0;

  std::size_t checks_run = 0;
  std::vector<SimAssertion> assertions;

  bool passed() const;
};

/// Monte Carlo tolerance for means, in standard errors.
inline constexpr double kMonteCarloSigmas = 3.0;

/// Throws InvalidRequest for n_runs < 1000 and GenError when a generator
/// fails. Discrete and concrete mechanisms must produce outputs of the
/// analyst's kind.
SimReport simulate_gain_distribution(const TrueMechanism& mechanism,
                                     const SimulatedAnalyst& analyst, std::size_t n_runs,
                                     std::uint64_t seed = 0);

/// Throws SpaceMismatch when the analysts use different outcome spaces and
/// InvalidRequest for a Bernoulli mechanism (it cannot place Y for two
/// different expected sets).
SimReport verify_two_analyst_scenarios(const SimulatedAnalyst& a, const SimulatedAnalyst& b,
                                       const TrueMechanism& mechanism, std::size_t n_runs,
                                       std::uint64_t seed = 0);

/// Deterministic grid checks: zero gain at p = 1; positivity and finiteness
/// of both observed gains and anomaly dominance on p_hat = 0.501 ... 0.999.
SimReport verify_structural_theorems(LogBase base = LogBase::Bits);

std::string format_report(const SimReport& report, int precision = 4);
nlohmann::ordered_json report_to_json(const SimReport& report);

}  // namespace infoiter
