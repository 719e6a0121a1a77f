#include "infoiter/session.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

using Json = nlohmann::ordered_json;

Json observed_json(const ScalarValue& y) {
  return std::visit([](const auto& v) { return Json(v); }, y);
}

Json params_json(const ToolParams& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

void common_fields(Json& j, const Session& session, const ToolSpec& tool,
                   const ExpectationDeclaration& decl, const ScalarValue& observed) {
  j["tool_id"] = tool.tool_id;
  j["params"] = params_json(tool.params);
  j["space"] = to_string(tool.declared_space);
  j["expected_set"] = to_string(decl.expected_set);
  j["p_hat"] = decl.assessment.p_expected();
  j["base"] = std::string(log_base_name(session.base()));
  j["observed"] = observed_json(observed);
}

// ---------------------------------------------------------------------------
// Replay helpers

struct LineContext {
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ReplayError, "line " + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void integrity(const std::string& what) const {
    throw Error(ErrorCode::IntegrityError, "line " + std::to_string(line) + ": " + what);
  }

  const Json& field(const Json& j, const char* key) const {
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  std::string str(const Json& j, const char* key) const {
    const Json& v = field(j, key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  double num(const Json& j, const char* key) const {
    const Json& v = field(j, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }

  std::size_t count(const Json& j, const char* key) const {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  // Converting engine errors raised while rebuilding values into ReplayError
  // keeps the line number attached; integrity errors pass through unchanged.
  template <typename F>
  auto guarded(F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IntegrityError || e.code() == ErrorCode::ReplayError ||
          e.code() == ErrorCode::BaseMismatch) {
        throw;
      }
      fail(std::string(e.code_name()) + ": " + e.what());
    }
  }
};

struct ParsedCommon {
  ToolSpec tool;
  ExpectationDeclaration declaration;
  ScalarValue observed;
};

ParsedCommon parse_common(const Json& j, const Session& session, const ToolRegistry& registry,
                          const LineContext& ctx) {
  if (ctx.str(j, "session_id") != session.session_id()) {
    ctx.integrity("session_id does not match the session header");
  }
  LogBase base = ctx.guarded([&] { return parse_log_base(ctx.str(j, "base")); });
  if (base != session.base()) {
    throw Error(ErrorCode::BaseMismatch, "line " + std::to_string(ctx.line) +
                                             ": log base differs from the session's base");
  }

  ParsedCommon out;
  const Json& pj = ctx.field(j, "params");
  if (!pj.is_object()) ctx.fail("field 'params' must be an object");
  ToolParams params;
  for (auto it = pj.begin(); it != pj.end(); ++it) {
    if (!it.value().is_string()) ctx.fail("tool parameters must be strings");
    params[it.key()] = it.value().get<std::string>();
  }
  out.tool = ctx.guarded([&] { return registry.make_spec(ctx.str(j, "tool_id"), params); });
  if (to_string(out.tool.declared_space) != ctx.str(j, "space")) {
    ctx.integrity("stored space '" + ctx.str(j, "space") + "' differs from the tool's space '" +
                  to_string(out.tool.declared_space) + "'");
  }

  const double p_hat = ctx.num(j, "p_hat");
  const std::string expected_text = ctx.str(j, "expected_set");
  std::string declared_at = j.contains("declared_at") ? ctx.str(j, "declared_at") : "";
  std::string note = j.contains("note") ? ctx.str(j, "note") : "";
  out.declaration = ctx.guarded([&] {
    return make_declaration(out.tool, expected_text, p_hat, note, declared_at.empty() ? "-" : declared_at);
  });
  if (declared_at.empty()) out.declaration.declared_at.clear();

  const Json& obs = ctx.field(j, "observed");
  switch (out.tool.output_kind) {
    case ScalarKind::Integer:
      if (!obs.is_number_integer()) ctx.fail("observed value must be an integer");
      out.observed = obs.get<std::int64_t>();
      break;
    case ScalarKind::Real:
      if (!obs.is_number()) ctx.fail("observed value must be a number");
      out.observed = obs.get<double>();
      break;
    case ScalarKind::Label:
      if (!obs.is_string()) ctx.fail("observed value must be a string");
      out.observed = obs.get<std::string>();
      break;
  }
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t tt = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

void validate_declaration(const ToolSpec& tool, const ExpectationDeclaration& declaration) {
  if (declaration.expected_set.kind() != tool.declared_space.kind()) {
    throw Error(ErrorCode::KindMismatch, "expected set kind differs from the tool's output kind");
  }
  if (!is_strict_subset(declaration.expected_set, tool.declared_space)) {
    throw Error(ErrorCode::InvalidExpectedSet,
                "expected set " + to_string(declaration.expected_set) +
                    " must be a nonempty strict subset of " + to_string(tool.declared_space));
  }
}

ExpectationDeclaration make_declaration(const ToolSpec& tool, OutcomeSet expected_set,
                                        double p_expected, std::string note,
                                        std::string declared_at) {
  ExpectationDeclaration d{std::move(expected_set), ProbabilityAssessment(p_expected),
                           declared_at.empty() ? utc_timestamp() : std::move(declared_at),
                           std::move(note)};
  validate_declaration(tool, d);
  return d;
}

ExpectationDeclaration make_declaration(const ToolSpec& tool, const std::string& expected_text,
                                        double p_expected, std::string note,
                                        std::string declared_at) {
  ProbabilityAssessment check(p_expected);
  (void)check;
  OutcomeSet e;
  try {
    e = parse_set(expected_text, tool.output_kind);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::EmptySpace) {
      throw Error(ErrorCode::InvalidExpectedSet, "expected set must be nonempty");
    }
    throw;
  }
  return make_declaration(tool, std::move(e), p_expected, std::move(note), std::move(declared_at));
}

Session::Session(std::string session_id, LogBase base, std::string created_at)
    : id_(std::move(session_id)),
      base_(base),
      created_at_(created_at.empty() ? utc_timestamp() : std::move(created_at)) {}

void Session::commit(const IterationRecord& record) {
  if (record.t != records_.size() + 1) {
    throw Error(ErrorCode::IntegrityError, "record index " + std::to_string(record.t) +
                                               " does not follow " + std::to_string(records_.size()));
  }
  const double s_g = s_g_ + record.g_observed;
  const double s_h = s_h_ + record.h_expected;
  if (!same_bits(s_g, record.s_g) || !same_bits(s_h, record.s_h)) {
    throw Error(ErrorCode::IntegrityError,
                "running sums of record " + std::to_string(record.t) + " do not match");
  }
  records_.push_back(record);
  s_g_ = s_g;
  s_h_ = s_h;
}

void Session::commit(const ViolationEvent& event) {
  if (event.after_t != records_.size()) {
    throw Error(ErrorCode::IntegrityError, "violation event is out of sequence");
  }
  violations_.push_back(event);
}

PlanSummary plan_iteration(const Session& session, const ToolSpec& tool,
                           const ExpectationDeclaration& declaration) {
  validate_declaration(tool, declaration);
  return {expected_gain(declaration.assessment, session.base()),
          anomaly_gain(declaration.assessment, session.base()),
          complement_within(declaration.expected_set, tool.declared_space)};
}

IterationOutcome evaluate_iteration(const Session& session, const ToolSpec& tool,
                                    const ExpectationDeclaration& declaration, const Dataset& data) {
  validate_declaration(tool, declaration);
  ScalarValue y = apply_tool(tool, data);
  EventVerdict verdict;
  try {
    verdict = classify(declaration.expected_set, tool.declared_space, y);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ModelViolation) throw;
    return ViolationEvent{session.records().size(), tool, declaration, y, e.what()};
  }
  IterationRecord r;
  r.t = session.records().size() + 1;
  r.tool = tool;
  r.declaration = declaration;
  r.observed = std::move(y);
  r.verdict = verdict;
  r.g_observed = observed_gain(verdict == EventVerdict::AsExpected, declaration.assessment,
                               session.base());
  r.h_expected = expected_gain(declaration.assessment, session.base());
  r.m_anomaly = anomaly_gain(declaration.assessment, session.base());
  r.s_g = session.s_g() + r.g_observed;
  r.s_h = session.s_h() + r.h_expected;
  return r;
}

IterationRecord run_iteration(Session& session, const ToolSpec& tool,
                              const ExpectationDeclaration& declaration, const Dataset& data) {
  auto outcome = evaluate_iteration(session, tool, declaration, data);
  if (auto* v = std::get_if<ViolationEvent>(&outcome)) {
    session.commit(*v);
    throw Error(ErrorCode::ModelViolation, v->message);
  }
  const auto& record = std::get<IterationRecord>(outcome);
  session.commit(record);
  return record;
}

SessionSummary session_summary(const Session& session) {
  SessionSummary s;
  s.t_count = session.records().size();
  s.s_g = session.s_g();
  s.s_h = session.s_h();
  s.divergence = s.s_g - s.s_h;
  s.divergence_per_step = s.t_count ? s.divergence / static_cast<double>(s.t_count) : 0.0;
  s.violation_count = session.violations().size();
  s.records = session.records();
  return s;
}

std::string serialize_header(const Session& session) {
  Json j;
  j["type"] = "session";
  j["session_id"] = session.session_id();
  j["base"] = std::string(log_base_name(session.base()));
  j["created_at"] = session.created_at();
  return j.dump();
}

std::string serialize_record(const Session& session, const IterationRecord& r) {
  Json j;
  j["type"] = "iteration";
  j["session_id"] = session.session_id();
  j["t"] = r.t;
  common_fields(j, session, r.tool, r.declaration, r.observed);
  j["verdict"] = std::string(verdict_name(r.verdict));
  j["g"] = r.g_observed;
  j["h"] = r.h_expected;
  j["m"] = r.m_anomaly;
  j["s_g"] = r.s_g;
  j["s_h"] = r.s_h;
  j["declared_at"] = r.declaration.declared_at;
  j["note"] = r.declaration.note;
  return j.dump();
}

std::string serialize_violation(const Session& session, const ViolationEvent& v) {
  Json j;
  j["type"] = "violation";
  j["session_id"] = session.session_id();
  j["after_t"] = v.after_t;
  common_fields(j, session, v.tool, v.declaration, v.observed);
  j["message"] = v.message;
  j["declared_at"] = v.declaration.declared_at;
  j["note"] = v.declaration.note;
  return j.dump();
}

std::string serialize_session(const Session& session) {
  std::string out = serialize_header(session) + "\n";
  std::size_t vi = 0;
  const auto& violations = session.violations();
  auto flush_violations = [&](std::size_t after_t) {
    while (vi < violations.size() && violations[vi].after_t == after_t) {
      out += serialize_violation(session, violations[vi++]) + "\n";
    }
  };
  flush_violations(0);
  for (const auto& r : session.records()) {
    out += serialize_record(session, r) + "\n";
    flush_violations(r.t);
  }
  return out;
}

Session parse_session_log(std::istream& in, const ToolRegistry& registry) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Session> session;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    LineContext ctx{line_no};
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      ctx.fail(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) ctx.fail("record must be a JSON object");
    const std::string type = ctx.str(j, "type");

    if (!session) {
      if (type != "session") ctx.fail("first record must be the session header");
      LogBase base = ctx.guarded([&] { return parse_log_base(ctx.str(j, "base")); });
      session = Session(ctx.str(j, "session_id"), base, ctx.str(j, "created_at"));
      continue;
    }

    if (type == "iteration") {
      ParsedCommon c = parse_common(j, *session, registry, ctx);
      IterationRecord r;
      r.t = ctx.count(j, "t");
      r.tool = std::move(c.tool);
      r.declaration = std::move(c.declaration);
      r.observed = std::move(c.observed);
      r.verdict = ctx.guarded([&] { return parse_verdict(ctx.str(j, "verdict")); });
      r.g_observed = ctx.num(j, "g");
      r.h_expected = ctx.num(j, "h");
      r.m_anomaly = ctx.num(j, "m");
      r.s_g = ctx.num(j, "s_g");
      r.s_h = ctx.num(j, "s_h");

      EventVerdict verdict;
      try {
        verdict = classify(r.declaration.expected_set, r.tool.declared_space, r.observed);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ModelViolation) {
          ctx.integrity("iteration records an output outside the outcome space");
        }
        throw;
      }
      if (verdict != r.verdict) ctx.integrity("stored verdict disagrees with the observed output");
      const LogBase base = session->base();
      const bool in_e = verdict == EventVerdict::AsExpected;
      if (!same_bits(r.g_observed, observed_gain(in_e, r.declaration.assessment, base))) {
        ctx.integrity("stored g disagrees with its recomputation");
      }
      if (!same_bits(r.h_expected, expected_gain(r.declaration.assessment, base))) {
        ctx.integrity("stored h disagrees with its recomputation");
      }
      if (!same_bits(r.m_anomaly, anomaly_gain(r.declaration.assessment, base))) {
        ctx.integrity("stored m disagrees with its recomputation");
      }
      try {
        session->commit(r);
      } catch (const Error& e) {
        ctx.integrity(e.what());
      }
    } else if (type == "violation") {
      ParsedCommon c = parse_common(j, *session, registry, ctx);
      ViolationEvent v;
      v.after_t = ctx.count(j, "after_t");
      v.tool = std::move(c.tool);
      v.declaration = std::move(c.declaration);
      v.observed = std::move(c.observed);
      v.message = ctx.str(j, "message");
      if (contains(v.tool.declared_space, v.observed)) {
        ctx.integrity("violation event records an output inside the outcome space");
      }
      try {
        session->commit(v);
      } catch (const Error& e) {
        ctx.integrity(e.what());
      }
    } else if (type == "session") {
      ctx.fail("duplicate session header");
    } else {
      ctx.fail("unknown record type '" + type + "'");
    }
  }
  if (!session) throw Error(ErrorCode::ReplayError, "log has no session header");
  return std::move(*session);
}

void persist(const Session& session, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidRequest, "cannot write '" + path.string() + "'");
  out << serialize_session(session);
  out.flush();
  if (!out) throw Error(ErrorCode::InvalidRequest, "write to '" + path.string() + "' failed");
}

Session replay(const std::filesystem::path& path, const ToolRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ReplayError, "cannot open '" + path.string() + "'");
  return parse_session_log(in, registry);
}

}  // namespace infoiter
