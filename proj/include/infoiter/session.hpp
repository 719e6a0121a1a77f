#pragma once

// Analytic iterations and their cumulative information accounting.
//
// One iteration: pick a tool, declare the expected set and its probability,
// apply the tool, classify the output. The session keeps every record plus
// the running sums S_G (observed gain) and S_H (expected gain). Their
// difference drifts upward when the analyst's assessments overstate
// certainty.
//
// Log format: one JSON object per line. The first line is the session header
//   {"type":"session","session_id":..,"base":"bits","created_at":..}
// followed by iteration lines
//   {"type":"iteration","session_id","t","tool_id","params","space",
//    "expected_set","p_hat","base","observed","verdict","g","h","m",
//    "s_g","s_h","declared_at","note"}
// and model-violation lines
//   {"type":"violation","session_id","after_t","tool_id","params","space",
//    "expected_set","p_hat","base","observed","message","declared_at","note"}
// Replay trusts none of the derived fields: verdicts, gains and running sums
// are recomputed and compared bit for bit.

#include <filesystem>
#include <istream>
#include <string>
#include <variant>
#include <vector>

#include "infoiter/info.hpp"
#include "infoiter/outcome.hpp"
#include "infoiter/tools.hpp"

namespace infoiter {

struct ExpectationDeclaration {
  OutcomeSet expected_set;
  ProbabilityAssessment assessment{0.75};
  std::string declared_at;
  std::string note;

  friend bool operator==(const ExpectationDeclaration&, const ExpectationDeclaration&) = default;
};

/// Validates the declaration against the tool's declared space. Throws
/// InvalidAssessment (p outside (0.5, 1)), InvalidExpectedSet (not a strict
/// subset) or KindMismatch. An empty `declared_at` is stamped with the
/// current UTC time.
ExpectationDeclaration make_declaration(const ToolSpec& tool, const std::string& expected_text,
                                        double p_expected, std::string note = "",
                                        std::string declared_at = "");
ExpectationDeclaration make_declaration(const ToolSpec& tool, OutcomeSet expected_set,
                                        double p_expected, std::string note = "",
                                        std::string declared_at = "");

void validate_declaration(const ToolSpec& tool, const ExpectationDeclaration& declaration);

struct IterationRecord {
  std::size_t t = 0;  // 1-based
  ToolSpec tool;
  ExpectationDeclaration declaration;
  ScalarValue observed;
  EventVerdict verdict = EventVerdict::AsExpected;
  double g_observed = 0.0;
  double h_expected = 0.0;
  double m_anomaly = 0.0;
  double s_g = 0.0;  // running sums including this record
  double s_h = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct ViolationEvent {
  std::size_t after_t = 0;
  ToolSpec tool;
  ExpectationDeclaration declaration;
  ScalarValue observed;
  std::string message;

  friend bool operator==(const ViolationEvent&, const ViolationEvent&) = default;
};

class Session {
 public:
  Session() = default;
  Session(std::string session_id, LogBase base, std::string created_at = "");

  const std::string& session_id() const noexcept { return id_; }
  LogBase base() const noexcept { return base_; }
  const std::string& created_at() const noexcept { return created_at_; }
  const std::vector<IterationRecord>& records() const noexcept { return records_; }
  const std::vector<ViolationEvent>& violations() const noexcept { return violations_; }
  double s_g() const noexcept { return s_g_; }
  double s_h() const noexcept { return s_h_; }

  /// Appends a fully formed record; t and the running sums must continue the
  /// sequence (IntegrityError otherwise).
  void commit(const IterationRecord& record);
  void commit(const ViolationEvent& event);

  friend bool operator==(const Session&, const Session&) = default;

 private:
  std::string id_;
  LogBase base_ = LogBase::Bits;
  std::string created_at_;
  std::vector<IterationRecord> records_;
  std::vector<ViolationEvent> violations_;
  double s_g_ = 0.0;
  double s_h_ = 0.0;
};

struct PlanSummary {
  double h_expected = 0.0;
  double m_anomaly = 0.0;
  OutcomeSet anomaly_set;
};

PlanSummary plan_iteration(const Session& session, const ToolSpec& tool,
                           const ExpectationDeclaration& declaration);

/// Either the record the iteration would append or the violation it would log.
using IterationOutcome = std::variant<IterationRecord, ViolationEvent>;

/// Applies the tool and classifies without touching the session.
IterationOutcome evaluate_iteration(const Session& session, const ToolSpec& tool,
                                    const ExpectationDeclaration& declaration, const Dataset& data);

/// evaluate_iteration + commit. A model violation is committed as a
/// violation event (sums unchanged) and then rethrown as ModelViolation.
IterationRecord run_iteration(Session& session, const ToolSpec& tool,
                              const ExpectationDeclaration& declaration, const Dataset& data);

struct SessionSummary {
  std::size_t t_count = 0;
  double s_g = 0.0;
  double s_h = 0.0;
  double divergence = 0.0;           // S_G - S_H
  double divergence_per_step = 0.0;  // divergence / t, 0 for an empty session
  std::size_t violation_count = 0;
  std::vector<IterationRecord> records;
};

SessionSummary session_summary(const Session& session);

std::string serialize_header(const Session& session);
std::string serialize_record(const Session& session, const IterationRecord& record);
std::string serialize_violation(const Session& session, const ViolationEvent& event);
/// Full log text, header first, events in commit order.
std::string serialize_session(const Session& session);

/// Throws ReplayError (with line number) on corrupt lines or invalid values,
/// IntegrityError when a derived field disagrees with its recomputation, and
/// BaseMismatch when a line uses a different log base than the session.
Session parse_session_log(std::istream& in, const ToolRegistry& registry = ToolRegistry::builtin());

void persist(const Session& session, const std::filesystem::path& path);
Session replay(const std::filesystem::path& path,
               const ToolRegistry& registry = ToolRegistry::builtin());

/// Current UTC time as ISO 8601 with milliseconds.
std::string utc_timestamp();

}  // namespace infoiter
