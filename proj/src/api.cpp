#include "infoiter/api.hpp"

#include <cstdio>
#include <mutex>
#include <vector>

namespace infoiter {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string str_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double num_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string opt_str(const Json& j, const char* key, std::string fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return str_field(j, key);
}

template <class T>
T opt_num(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  const Json& v = j.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
      throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<T>();
  } else {
    return num_field(j, key);
  }
}

LogBase base_field(const Json& j) { return parse_log_base(opt_str(j, "base", "bits")); }

std::string param_text(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw Error(ErrorCode::InvalidRequest, "param '" + key + "' must be a string or number");
}

ScalarKind parse_kind(const std::string& text) {
  if (text == "integer" || text == "int") return ScalarKind::Integer;
  if (text == "real") return ScalarKind::Real;
  if (text == "label") return ScalarKind::Label;
  throw Error(ErrorCode::InvalidRequest, "unknown column kind '" + text + "'");
}

SchemaHints schema_from_json(const Json& req) {
  SchemaHints hints;
  if (!req.is_object() || !req.contains("schema")) return hints;
  const Json& s = req.at("schema");
  if (!s.is_object()) throw Error(ErrorCode::InvalidRequest, "field 'schema' must be an object");
  for (const auto& [name, kind] : s.items()) {
    if (!kind.is_string()) throw Error(ErrorCode::InvalidRequest, "schema kinds must be strings");
    hints[name] = parse_kind(kind.get<std::string>());
  }
  return hints;
}

std::string dataset_id_for(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "d%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json describe_dataset(const std::string& id, const Dataset& data) {
  Json cols = Json::array();
  for (const auto& c : data.columns()) {
    cols.push_back({{"name", c.name()},
                    {"kind", scalar_kind_name(c.kind())},
                    {"missing", c.missing_count()}});
  }
  return {{"dataset_id", id}, {"rows", data.rows()}, {"columns", std::move(cols)}};
}

SimulatedAnalyst analyst_from_json(const Json& j, const OutcomeSpace& space, LogBase base,
                                   const std::string& fallback_id) {
  return SimulatedAnalyst::make(opt_str(j, "id", fallback_id), space,
                                parse_set(str_field(j, "expect"), space.kind()), num_field(j, "p"),
                                base);
}

ScalarValue outcome_value(const Json& v, ScalarKind kind) {
  if (v.is_string()) return parse_scalar(v.get<std::string>(), kind);
  if (v.is_number()) return parse_scalar(v.dump(), kind);
  throw Error(ErrorCode::InvalidRequest, "outcome values must be strings or numbers");
}

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j;
  }
  if (!parts.empty() && parts.front() == "api") parts.erase(parts.begin());
  return parts;
}

Json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
  Json j = Json::parse(body);
  if (!j.is_object()) throw Error(ErrorCode::InvalidRequest, "request body must be a JSON object");
  return j;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ModelViolation:
    case ErrorCode::ToolDomainError: return 422;
    case ErrorCode::ToolContractError:
    case ErrorCode::ReplayError:
    case ErrorCode::IntegrityError:
    case ErrorCode::BaseMismatch: return 500;
    default: return 400;
  }
}

Json ok_envelope(Json payload) {
  return {{"ok", true}, {"payload", std::move(payload)}, {"engine_version", kEngineVersion}};
}

Json error_envelope(ErrorCode code, const std::string& message) {
  return {{"ok", false},
          {"error", {{"code", error_code_name(code)}, {"message", message}}},
          {"engine_version", kEngineVersion}};
}

Json scalar_to_json(const ScalarValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

Json record_to_json(const IterationRecord& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.tool.params) params[k] = v;
  return {{"t", r.t},
          {"tool_id", r.tool.tool_id},
          {"params", std::move(params)},
          {"space", to_string(r.tool.declared_space)},
          {"expected_set", to_string(r.declaration.expected_set)},
          {"p_hat", r.declaration.assessment.p_expected()},
          {"observed", scalar_to_json(r.observed)},
          {"verdict", verdict_name(r.verdict)},
          {"g", r.g_observed},
          {"h", r.h_expected},
          {"m", r.m_anomaly},
          {"s_g", r.s_g},
          {"s_h", r.s_h},
          {"declared_at", r.declaration.declared_at},
          {"note", r.declaration.note}};
}

Json summary_to_json(const std::string& session_id, LogBase base, const SessionSummary& s) {
  Json records = Json::array();
  for (const auto& r : s.records) records.push_back(record_to_json(r));
  return {{"session_id", session_id},
          {"base", log_base_name(base)},
          {"t", s.t_count},
          {"s_g", s.s_g},
          {"s_h", s.s_h},
          {"divergence", s.divergence},
          {"divergence_per_step", s.divergence_per_step},
          {"violations", s.violation_count},
          {"records", std::move(records)}};
}

Json ranking_to_json(const Ranking& ranking, const std::vector<CandidateTriple>& triples) {
  Json entries = Json::array();
  std::size_t rank = 1;
  for (const auto& e : ranking.entries) {
    const CandidateTriple* c = nullptr;
    for (const auto& t : triples) {
      if (t.j == e.j) c = &t;
    }
    Json row = {{"rank", rank++}, {"j", e.j}, {"score", e.score}};
    if (c) {
      row["tool_id"] = c->tool.tool_id;
      row["expected_set"] = to_string(c->declaration.expected_set);
      row["p_hat"] = c->declaration.assessment.p_expected();
    }
    entries.push_back(std::move(row));
  }
  return {{"criterion", criterion_name(ranking.criterion)},
          {"chosen", ranking.chosen},
          {"entries", std::move(entries)}};
}

Json verdict_to_json(const InformativenessVerdict& v) {
  return {{"informative", v.informative}, {"method", v.method},
          {"mean_h1", v.mean_h1},         {"mean_h2", v.mean_h2},
          {"ci_separation", v.ci_separation}, {"p_value", v.p_value},
          {"n_replicates", v.n_replicates}};
}

ToolSpec tool_from_json(const Json& j, bool require_all, const ToolRegistry& registry) {
  ToolParams params;
  if (j.contains("params") && !j.at("params").is_null()) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw Error(ErrorCode::InvalidRequest, "field 'params' must be an object");
    for (const auto& [k, v] : p.items()) params[k] = param_text(v, k);
  }
  if (j.contains("space") && !j.at("space").is_null()) params["space"] = str_field(j, "space");
  return registry.make_spec(str_field(j, "tool"), std::move(params), require_all);
}

ExpectationDeclaration declaration_from_json(const ToolSpec& tool, const Json& j) {
  const double p = num_field(j, "p");
  return make_declaration(tool, str_field(j, "expect"), p, opt_str(j, "note", ""),
                          opt_str(j, "declared_at", ""));
}

SimReport run_simulation(const Json& scenario) {
  const std::string kind = opt_str(scenario, "kind", "gain_distribution");
  const LogBase base = base_field(scenario);
  if (kind == "theorems") return verify_structural_theorems(base);
  if (kind != "gain_distribution" && kind != "two_analyst") {
    throw Error(ErrorCode::InvalidRequest, "unknown simulation kind '" + kind + "'");
  }
  const auto n_runs = opt_num<std::size_t>(scenario, "n_runs", 10000);
  const auto seed = opt_num<std::uint64_t>(scenario, "seed", 0);

  const Json& mj = field(scenario, "mechanism");
  const std::string type = str_field(mj, "type");
  std::optional<TrueMechanism> mechanism;
  std::optional<OutcomeSpace> space;
  if (scenario.contains("space")) space = parse_set(str_field(scenario, "space"));

  if (type == "bernoulli") {
    mechanism = BernoulliEvent{num_field(mj, "p_true")};
  } else if (type == "discrete") {
    if (!space) throw Error(ErrorCode::InvalidRequest, "a discrete mechanism needs 'space'");
    DiscreteOutcomes d;
    const Json& outcomes = field(mj, "outcomes");
    if (!outcomes.is_array()) throw Error(ErrorCode::InvalidRequest, "'outcomes' must be an array");
    for (const auto& o : outcomes) {
      if (!o.is_array() || o.size() != 2 || !o[1].is_number()) {
        throw Error(ErrorCode::InvalidRequest, "each outcome must be [value, probability]");
      }
      d.outcomes.emplace_back(outcome_value(o[0], space->kind()), o[1].get<double>());
    }
    mechanism = std::move(d);
  } else if (type == "concrete") {
    ToolSpec tool = tool_from_json(mj);
    if (!space) space = tool.declared_space;
    ConcreteMechanism c{parse_generator(str_field(mj, "generator")), std::move(tool), std::nullopt};
    if (mj.contains("p_event") && !mj.at("p_event").is_null()) c.p_event = num_field(mj, "p_event");
    mechanism = std::move(c);
  } else {
    throw Error(ErrorCode::InvalidRequest, "unknown mechanism type '" + type + "'");
  }
  if (!space) {
    // The Bernoulli plane only needs a space to host the expected set.
    space = parse_set(opt_str(scenario, "space", "{0,1}"));
  }

  if (kind == "gain_distribution") {
    auto analyst = analyst_from_json(field(scenario, "analyst"), *space, base, "A");
    return simulate_gain_distribution(*mechanism, analyst, n_runs, seed);
  }
  const Json& list = field(scenario, "analysts");
  if (!list.is_array() || list.size() != 2) {
    throw Error(ErrorCode::InvalidRequest, "'analysts' must list exactly two analysts");
  }
  auto space_for = [&](const Json& j) {
    return j.contains("space") ? parse_set(str_field(j, "space")) : *space;
  };
  auto a = analyst_from_json(list[0], space_for(list[0]), parse_log_base(opt_str(list[0], "base", std::string(log_base_name(base)))), "A");
  auto b = analyst_from_json(list[1], space_for(list[1]), parse_log_base(opt_str(list[1], "base", std::string(log_base_name(base)))), "B");
  return verify_two_analyst_scenarios(a, b, *mechanism, n_runs, seed);
}

Api::Api(ApiOptions options) : options_(std::move(options)), store_(options_.log_dir) {}

Json Api::add_dataset(std::string_view csv_text) {
  if (csv_text.size() > options_.upload_limit) {
    throw Error(ErrorCode::IngestError, "upload of " + std::to_string(csv_text.size()) +
                                            " bytes exceeds the limit of " +
                                            std::to_string(options_.upload_limit));
  }
  auto data = std::make_shared<const Dataset>(parse_csv_text(std::string(csv_text)));
  const std::string id = dataset_id_for(csv_text);
  {
    std::unique_lock lock(datasets_mutex_);
    datasets_.emplace(id, data);
  }
  return describe_dataset(id, *data);
}

std::shared_ptr<const Dataset> Api::dataset_for(const Json& req) {
  if (req.contains("csv")) {
    const std::string text = str_field(req, "csv");
    if (text.size() > options_.upload_limit) {
      throw Error(ErrorCode::IngestError, "inline CSV exceeds the upload limit");
    }
    return std::make_shared<const Dataset>(parse_csv_text(text, schema_from_json(req)));
  }
  const std::string id = str_field(req, "dataset_id");
  std::shared_lock lock(datasets_mutex_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw Error(ErrorCode::NotFound, "unknown dataset '" + id + "'");
  return it->second;
}

Json Api::create_session(const Json& req) {
  const LogBase base = base_field(req);
  const std::string id = store_.create(opt_str(req, "session_id", ""), base);
  Session s = store_.snapshot(id);
  return {{"session_id", id}, {"base", log_base_name(base)}, {"created_at", s.created_at()}};
}

Json Api::list_sessions() {
  Json out = Json::array();
  for (const auto& id : store_.list()) out.push_back(id);
  return {{"sessions", std::move(out)}};
}

Json Api::summary(const std::string& id) {
  Session s = store_.snapshot(id);
  return summary_to_json(id, s.base(), session_summary(s));
}

Json Api::plan(const std::optional<std::string>& id, const Json& req) {
  ProbabilityAssessment(num_field(req, "p"));
  ToolSpec tool = tool_from_json(req, false);
  ExpectationDeclaration decl = declaration_from_json(tool, req);
  PlanSummary p;
  LogBase base;
  if (id) {
    p = store_.plan(*id, tool, decl);
    base = store_.snapshot(*id).base();
  } else {
    base = base_field(req);
    p = plan_iteration(Session("plan", base, "-"), tool, decl);
  }
  return {{"tool_id", tool.tool_id},
          {"space", to_string(tool.declared_space)},
          {"expected_set", to_string(decl.expected_set)},
          {"anomaly_set", to_string(p.anomaly_set)},
          {"p_hat", decl.assessment.p_expected()},
          {"base", log_base_name(base)},
          {"h", p.h_expected},
          {"m", p.m_anomaly}};
}

Json Api::run(const std::string& id, const Json& req) {
  if (!store_.exists(id)) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
  ProbabilityAssessment(num_field(req, "p"));
  ToolSpec tool = tool_from_json(req);
  ExpectationDeclaration decl = declaration_from_json(tool, req);
  auto data = dataset_for(req);
  return record_to_json(store_.run(id, tool, decl, *data));
}

Json Api::rank(const Json& req, LogBase base) {
  const Json& list = field(req, "candidates");
  if (!list.is_array()) throw Error(ErrorCode::InvalidRequest, "'candidates' must be an array");
  std::vector<CandidateTriple> triples;
  for (const auto& c : list) {
    ToolSpec tool = tool_from_json(c, false);
    ExpectationDeclaration decl = declaration_from_json(tool, c);
    triples.push_back({std::move(tool), std::move(decl), triples.size() + 1});
  }
  const std::string crit = opt_str(req, "criterion", "");
  if (!crit.empty()) return ranking_to_json(score_triples(triples, parse_criterion(crit), base), triples);
  if (triples.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidate triples to rank");
  return {{"ExpectedGain", ranking_to_json(score_triples(triples, Criterion::ExpectedGain, base), triples)},
          {"AnomalyGain", ranking_to_json(score_triples(triples, Criterion::AnomalyGain, base), triples)}};
}

Json Api::informativeness(const Json& req) {
  ToolSpec tool = tool_from_json(req);
  InformativenessOptions opts;
  opts.n_replicates = opt_num<std::size_t>(req, "n_replicates", opts.n_replicates);
  opts.alpha = opt_num<double>(req, "alpha", opts.alpha);
  opts.seed = opt_num<std::uint64_t>(req, "seed", opts.seed);
  auto h1 = parse_generator(str_field(req, "h1"), "H1");
  auto h2 = parse_generator(str_field(req, "h2"), "H2");
  Json out = verdict_to_json(informativeness_check(tool, h1, h2, opts));
  out["alpha"] = opts.alpha;
  out["h1"] = to_string(h1);
  out["h2"] = to_string(h2);
  return out;
}

Json Api::tools() const {
  Json out = Json::array();
  for (const auto& def : ToolRegistry::builtin().list()) {
    out.push_back({{"id", def->id},
                   {"description", def->description},
                   {"output_kind", scalar_kind_name(def->output_kind)},
                   {"required_params", def->required_params},
                   {"optional_params", def->optional_params},
                   {"space", to_string(def->intrinsic_space({}))}});
  }
  return {{"tools", std::move(out)}};
}

ApiResponse Api::dispatch(std::string_view method, std::string_view path, std::string_view body) {
  try {
    const auto p = split_path(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto ok = [](Json payload, int status = 200) { return ApiResponse{status, ok_envelope(std::move(payload))}; };

    if (p.size() == 1 && p[0] == "tools" && get) return ok(tools());
    if (p.size() == 1 && p[0] == "sessions") {
      if (post) return ok(create_session(parse_body(body)), 201);
      if (get) return ok(list_sessions());
    }
    if (p.size() == 3 && p[0] == "sessions") {
      const std::string& id = p[1];
      if (p[2] == "summary" && get) return ok(summary(id));
      if (p[2] == "plan" && post) return ok(plan(id, parse_body(body)));
      if (p[2] == "iterations" && post) return ok(run(id, parse_body(body)));
      if (p[2] == "rank" && post) {
        const LogBase base = store_.snapshot(id).base();
        return ok(rank(parse_body(body), base));
      }
    }
    if (p.size() == 1 && post) {
      if (p[0] == "plan") return ok(plan(std::nullopt, parse_body(body)));
      if (p[0] == "rank") {
        Json req = parse_body(body);
        return ok(rank(req, base_field(req)));
      }
      if (p[0] == "datasets") return ok(add_dataset(body), 201);
      if (p[0] == "informativeness") return ok(informativeness(parse_body(body)));
      if (p[0] == "simulate") return ok(report_to_json(run_simulation(parse_body(body))));
    }
    return {404, error_envelope(ErrorCode::NotFound,
                                "no route for " + std::string(method) + " " + std::string(path))};
  } catch (const Error& e) {
    int status = http_status(e.code());
    if (e.code() == ErrorCode::IngestError && body.size() > options_.upload_limit) status = 413;
    return {status, error_envelope(e.code(), e.what())};
  } catch (const nlohmann::json::exception& e) {
    return {400, error_envelope(ErrorCode::InvalidRequest, std::string("malformed JSON: ") + e.what())};
  } catch (const std::exception& e) {
    return {500, {{"ok", false},
                  {"error", {{"code", "InternalError"}, {"message", e.what()}}},
                  {"engine_version", kEngineVersion}}};
  }
}

}  // namespace infoiter
