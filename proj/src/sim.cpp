#include "infoiter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

// Uniform double in [0, 1) straight from the counter-based seed.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t run) {
  return static_cast<double>(derive_seed(seed, stream, run) >> 11) * 0x1.0p-53;
}

struct RunningMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

// Draws Y for run `run`; nullopt for the Bernoulli plane, where only the
// event indicator exists.
class OutcomeSource {
 public:
  OutcomeSource(const TrueMechanism& mechanism, std::uint64_t seed)
      : mechanism_(mechanism), seed_(seed) {
    if (const auto* d = std::get_if<DiscreteOutcomes>(&mechanism_)) {
      double total = 0.0;
      for (const auto& [y, p] : d->outcomes) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw Error(ErrorCode::InvalidRequest, "outcome probabilities must be non-negative");
        }
        total += p;
        cumulative_.push_back(total);
      }
      if (d->outcomes.empty() || std::fabs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidRequest, "outcome probabilities must sum to 1");
      }
    }
    if (const auto* b = std::get_if<BernoulliEvent>(&mechanism_)) {
      if (!(b->p_true >= 0.0 && b->p_true <= 1.0)) {
        throw Error(ErrorCode::InvalidRequest, "p_true must lie in [0, 1]");
      }
    }
    if (const auto* c = std::get_if<ConcreteMechanism>(&mechanism_)) c->generator.validate();
  }

  ScalarValue draw(std::uint64_t run) const {
    if (const auto* d = std::get_if<DiscreteOutcomes>(&mechanism_)) {
      const double u = counter_uniform(seed_, 0, run) * cumulative_.back();
      for (std::size_t i = 0; i < cumulative_.size(); ++i) {
        if (u < cumulative_[i]) return d->outcomes[i].first;
      }
      return d->outcomes.back().first;
    }
    const auto& c = std::get<ConcreteMechanism>(mechanism_);
    Dataset data;
    try {
      data = c.generator.sample(derive_seed(seed_, 0, run));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::GenError) throw;
      throw Error(ErrorCode::GenError, std::string("generator failed: ") + e.what());
    }
    return apply_tool(c.tool, data);
  }

  bool event(std::uint64_t run) const {
    return counter_uniform(seed_, 0, run) < std::get<BernoulliEvent>(mechanism_).p_true;
  }

 private:
  const TrueMechanism& mechanism_;
  std::uint64_t seed_;
  std::vector<double> cumulative_;
};

std::optional<double> theoretical_event_probability(const TrueMechanism& mechanism,
                                                    const SimulatedAnalyst& analyst) {
  if (const auto* b = std::get_if<BernoulliEvent>(&mechanism)) return b->p_true;
  if (const auto* d = std::get_if<DiscreteOutcomes>(&mechanism)) {
    double p = 0.0;
    for (const auto& [y, prob] : d->outcomes) {
      if (contains(analyst.expected_set, y)) p += prob;
    }
    return p;
  }
  return std::get<ConcreteMechanism>(mechanism).p_event;
}

double mean_gain_under(double p_true, const SimulatedAnalyst& analyst) {
  if (p_true > 0.0 && p_true < 1.0) {
    return cross_entropy_gain(p_true, analyst.assessment, analyst.base);
  }
  return p_true * observed_gain(true, analyst.assessment, analyst.base) +
         (1.0 - p_true) * observed_gain(false, analyst.assessment, analyst.base);
}

SimAssertion within_sigmas(std::string name, double observed, double expected, double se) {
  const double tol = kMonteCarloSigmas * se;
  return {std::move(name), std::fabs(observed - expected) <= tol, observed, expected, tol};
}

SimAssertion exact_count(std::string name, std::size_t observed, std::size_t expected) {
  return {std::move(name), observed == expected, static_cast<double>(observed),
          static_cast<double>(expected), 0.0};
}

}  // namespace

SimulatedAnalyst SimulatedAnalyst::make(std::string id, OutcomeSpace space, OutcomeSet expected_set,
                                        double p_hat, LogBase base) {
  if (!is_strict_subset(expected_set, space)) {
    throw Error(ErrorCode::InvalidExpectedSet, "analyst '" + id + "' expected set " +
                                                   to_string(expected_set) +
                                                   " is not a strict subset of " + to_string(space));
  }
  return SimulatedAnalyst{std::move(id), std::move(space), std::move(expected_set),
                          ProbabilityAssessment(p_hat), base};
}

bool SimReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const SimAssertion& a) { return a.passed; });
}

SimReport simulate_gain_distribution(const TrueMechanism& mechanism,
                                     const SimulatedAnalyst& analyst, std::size_t n_runs,
                                     std::uint64_t seed) {
  if (n_runs < 1000) throw Error(ErrorCode::InvalidRequest, "simulation needs at least 1000 runs");
  OutcomeSource source(mechanism, seed);
  const bool bernoulli = std::holds_alternative<BernoulliEvent>(mechanism);
  const double g_in = observed_gain(true, analyst.assessment, analyst.base);
  const double g_out = observed_gain(false, analyst.assessment, analyst.base);
  const double h = expected_gain(analyst.assessment, analyst.base);

  SimReport report;
  report.kind = "gain_distribution";
  report.n_runs = n_runs;
  report.seed = seed;

  RunningMoments g;
  std::size_t hits = 0;
  for (std::size_t run = 0; run < n_runs; ++run) {
    bool in_e;
    if (bernoulli) {
      in_e = source.event(run);
    } else {
      ScalarValue y = source.draw(run);
      try {
        in_e = classify(analyst.expected_set, analyst.space, y) == EventVerdict::AsExpected;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ModelViolation) throw;
        ++report.model_violations;
        continue;
      }
    }
    hits += in_e ? 1 : 0;
    g.add(in_e ? g_in : g_out);
  }

  report.mean_g = g.mean;
  report.se_g = g.std_error();
  report.event_frequency = g.n ? static_cast<double>(hits) / static_cast<double>(g.n) : 0.0;
  report.mean_drift = g.mean - h;
  report.se_drift = report.se_g;
  if (auto p = theoretical_event_probability(mechanism, analyst)) {
    report.theory_g = mean_gain_under(*p, analyst);
    report.theory_drift = *report.theory_g - h;
    report.assertions.push_back(
        within_sigmas("mean observed gain matches its expectation", report.mean_g,
                      *report.theory_g, report.se_g));
    report.assertions.push_back(within_sigmas("per-step calibration drift matches its expectation",
                                              report.mean_drift, *report.theory_drift,
                                              report.se_drift));
  }
  report.assertions.push_back(exact_count("no model violations", report.model_violations, 0));
  report.checks_run = report.assertions.size();
  return report;
}

SimReport verify_two_analyst_scenarios(const SimulatedAnalyst& a, const SimulatedAnalyst& b,
                                       const TrueMechanism& mechanism, std::size_t n_runs,
                                       std::uint64_t seed) {
  if (!(a.space == b.space)) {
    throw Error(ErrorCode::SpaceMismatch, "analysts declare over different outcome spaces: " +
                                              to_string(a.space) + " vs " + to_string(b.space));
  }
  if (std::holds_alternative<BernoulliEvent>(mechanism)) {
    throw Error(ErrorCode::InvalidRequest,
                "two-analyst runs need a mechanism that produces outputs");
  }
  if (a.base != b.base) throw Error(ErrorCode::BaseMismatch, "analysts use different log bases");
  if (n_runs == 0) throw Error(ErrorCode::InvalidRequest, "n_runs must be positive");
  OutcomeSource source(mechanism, seed);

  SimReport report;
  report.kind = "two_analyst";
  report.n_runs = n_runs;
  report.seed = seed;

  const double pa = a.assessment.p_expected();
  const double pb = b.assessment.p_expected();
  const bool same_assessment = pa == pb;
  std::size_t equal_gain_breaches = 0;

  for (std::size_t run = 0; run < n_runs; ++run) {
    ScalarValue y = source.draw(run);
    bool a_in, b_in;
    try {
      a_in = classify(a.expected_set, a.space, y) == EventVerdict::AsExpected;
      b_in = classify(b.expected_set, b.space, y) == EventVerdict::AsExpected;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ModelViolation) throw;
      ++report.model_violations;
      continue;
    }
    const int scenario = a_in ? (b_in ? 3 : 1) : (b_in ? 2 : 4);
    ++report.scenario_counts[scenario - 1];
    const double ga = observed_gain(a_in, a.assessment, a.base);
    const double gb = observed_gain(b_in, b.assessment, b.base);
    if (ga == gb) {
      ++report.gains_equal;
      if (!(same_assessment && (scenario == 3 || scenario == 4))) ++equal_gain_breaches;
    } else {
      ++report.gains_differ;
    }
  }

  std::size_t total = 0;
  for (auto c : report.scenario_counts) total += c;
  report.assertions.push_back(
      exact_count("scenario counts partition the runs", total + report.model_violations, n_runs));
  report.assertions.push_back(exact_count("no model violations", report.model_violations, 0));
  if (!same_assessment) {
    report.assertions.push_back(
        exact_count("unequal assessments give different gains in every run", report.gains_differ,
                    n_runs));
  }
  report.assertions.push_back(exact_count(
      "equal gains only with equal assessments and same-side verdicts", equal_gain_breaches, 0));
  if (same_assessment && a.expected_set == b.expected_set) {
    report.assertions.push_back(
        exact_count("identical declarations give equal gains in every run", report.gains_equal,
                    n_runs));
  }
  report.checks_run = report.assertions.size();
  return report;
}

SimReport verify_structural_theorems(LogBase base) {
  SimReport report;
  report.kind = "structural_theorems";

  const bool zero_at_one = gain_for_probability(1.0, base) == 0.0;
  report.assertions.push_back({"gain is zero when the event is certain", zero_at_one,
                               gain_for_probability(1.0, base), 0.0, 0.0});
  std::size_t checks = 1;
  std::size_t positivity_fail = 0, finiteness_fail = 0, dominance_fail = 0;
  for (int k = 501; k <= 999; ++k) {
    const ProbabilityAssessment a(k / 1000.0);
    const double g_in = observed_gain(true, a, base);
    const double g_out = observed_gain(false, a, base);
    const double m = anomaly_gain(a, base);
    if (!(g_in > 0.0 && g_out > 0.0)) ++positivity_fail;
    if (!(std::isfinite(g_in) && std::isfinite(g_out))) ++finiteness_fail;
    if (!(m > gain_for_probability(a.p_expected(), base))) ++dominance_fail;
    checks += 3;
  }
  report.assertions.push_back(exact_count("observed gains are strictly positive", positivity_fail, 0));
  report.assertions.push_back(exact_count("observed gains are finite", finiteness_fail, 0));
  report.assertions.push_back(exact_count("anomaly gain exceeds the as-expected gain", dominance_fail, 0));
  report.checks_run = checks;
  return report;
}

std::string format_report(const SimReport& r, int precision) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << "report: " << r.kind << "\n";
  if (r.kind == "gain_distribution") {
    out << "runs: " << r.n_runs << "  seed: " << r.seed << "\n";
    out << "mean G: " << r.mean_g << " (se " << r.se_g << ")\n";
    if (r.theory_g) out << "expected G: " << *r.theory_g << "\n";
    out << "event frequency: " << r.event_frequency << "\n";
    out << "per-step drift: " << r.mean_drift;
    if (r.theory_drift) out << " (expected " << *r.theory_drift << ")";
    out << "\n";
  } else if (r.kind == "two_analyst") {
    out << "runs: " << r.n_runs << "  seed: " << r.seed << "\n";
    for (int s = 0; s < 4; ++s) out << "scenario " << s + 1 << ": " << r.scenario_counts[s] << "\n";
    out << "gains differ: " << r.gains_differ << "  gains equal: " << r.gains_equal << "\n";
  } else {
    out << "checks: " << r.checks_run << "\n";
  }
  for (const auto& a : r.assertions) {
    out << (a.passed ? "PASS " : "FAIL ") << a.name << "\n";
  }
  out << (r.passed() ? "overall: PASS" : "overall: FAIL") << "\n";
  return out.str();
}

nlohmann::ordered_json report_to_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["n_runs"] = r.n_runs;
  j["seed"] = r.seed;
  if (r.kind == "gain_distribution") {
    j["mean_g"] = r.mean_g;
    j["se_g"] = r.se_g;
    j["theory_g"] = r.theory_g ? nlohmann::ordered_json(*r.theory_g) : nlohmann::ordered_json();
    j["event_frequency"] = r.event_frequency;
    j["mean_drift"] = r.mean_drift;
    j["se_drift"] = r.se_drift;
    j["theory_drift"] =
        r.theory_drift ? nlohmann::ordered_json(*r.theory_drift) : nlohmann::ordered_json();
    j["model_violations"] = r.model_violations;
  } else if (r.kind == "two_analyst") {
    j["scenario_counts"] = r.scenario_counts;
    j["gains_differ"] = r.gains_differ;
    j["gains_equal"] = r.gains_equal;
    j["model_violations"] = r.model_violations;
  }
  j["checks_run"] = r.checks_run;
  auto& list = j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& a : r.assertions) {
    list.push_back({{"name", a.name},
                    {"passed", a.passed},
                    {"observed", a.observed},
                    {"expected", a.expected},
                    {"tolerance", a.tolerance}});
  }
  j["passed"] = r.passed();
  return j;
}

}  // namespace infoiter
