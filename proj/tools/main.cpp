#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoiter/api.hpp"
#include "infoiter/http_server.hpp"

using namespace infoiter;

namespace {

struct Failure {
  std::string code;
  std::string message;
  Json envelope;
};

struct Globals {
  int precision = 4;
  bool json = false;
  std::string log_dir;
};

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string read_file(const std::string& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

Json params_json(const std::vector<std::string>& kvs) {
  Json out = Json::object();
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::ParamError, "--param expects key=value, got '" + kv + "'");
    }
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

// Calls the shared request path and unwraps the envelope.
Json call(Api& api, std::string_view method, const std::string& path, const Json& body) {
  ApiResponse r = api.dispatch(method, path, body.is_null() ? "" : body.dump());
  if (!r.body.at("ok").get<bool>()) {
    const auto& e = r.body.at("error");
    throw Failure{e.at("code").get<std::string>(), e.at("message").get<std::string>(), r.body};
  }
  return r.body.at("payload");
}

Api make_api(const std::optional<std::string>& log_dir) {
  ApiOptions opts;
  if (log_dir) opts.log_dir = *log_dir;
  return Api(opts);
}

void print_summary(const Json& s, int prec) {
  const std::string unit = s.at("base").get<std::string>();
  std::cout << "session   " << s.at("session_id").get<std::string>() << " (" << unit << ")\n"
            << "t         " << s.at("t").get<std::size_t>() << "\n"
            << "S_G       " << fixed(s.at("s_g").get<double>(), prec) << "\n"
            << "S_H       " << fixed(s.at("s_h").get<double>(), prec) << "\n"
            << "S_G - S_H " << fixed(s.at("divergence").get<double>(), prec) << "\n"
            << "per step  " << fixed(s.at("divergence_per_step").get<double>(), prec) << "\n"
            << "violations " << s.at("violations").get<std::size_t>() << "\n";
  if (s.at("records").empty()) return;
  std::cout << "\n  t  tool              expected          p_hat   observed  verdict      G        H\n";
  for (const auto& r : s.at("records")) {
    char line[512];
    std::snprintf(line, sizeof(line), "%3zu  %-16s  %-16s  %-6s  %-8s  %-11s  %-7s  %s\n",
                  r.at("t").get<std::size_t>(), r.at("tool_id").get<std::string>().c_str(),
                  r.at("expected_set").get<std::string>().c_str(),
                  fixed(r.at("p_hat").get<double>(), prec).c_str(), r.at("observed").dump().c_str(),
                  r.at("verdict").get<std::string>().c_str(),
                  fixed(r.at("g").get<double>(), prec).c_str(),
                  fixed(r.at("h").get<double>(), prec).c_str());
    std::cout << line;
  }
}

void print_ranking(const Json& r, int prec) {
  std::cout << "criterion " << r.at("criterion").get<std::string>() << "\n"
            << "rank  j   tool              expected          p_hat   score\n";
  for (const auto& e : r.at("entries")) {
    char line[512];
    std::snprintf(line, sizeof(line), "%4zu  %-2zu  %-16s  %-16s  %-6s  %s\n",
                  e.at("rank").get<std::size_t>(), e.at("j").get<std::size_t>(),
                  e.at("tool_id").get<std::string>().c_str(),
                  e.at("expected_set").get<std::string>().c_str(),
                  fixed(e.at("p_hat").get<double>(), prec).c_str(),
                  fixed(e.at("score").get<double>(), prec).c_str());
    std::cout << line;
  }
  std::cout << "chosen j=" << r.at("chosen").get<std::size_t>() << "\n";
}

void emit(const Globals& g, const Json& payload, const std::function<void()>& human) {
  if (g.json) {
    std::cout << ok_envelope(payload).dump(2) << "\n";
  } else {
    human();
  }
}

struct IterFlags {
  std::string tool;
  std::vector<std::string> params;
  std::string space;
  std::string expect;
  std::optional<double> p;
  std::string session;
  std::string base = "bits";
  std::string note;
};

Json iter_request(const IterFlags& f) {
  Json req = Json::object();
  // The assessment goes first so a bad p is reported before anything else.
  if (f.p) req["p"] = *f.p;
  if (!f.tool.empty()) req["tool"] = f.tool;
  req["params"] = params_json(f.params);
  if (!f.space.empty()) req["space"] = f.space;
  if (!f.expect.empty()) req["expect"] = f.expect;
  if (!f.note.empty()) req["note"] = f.note;
  req["base"] = f.base;
  return req;
}

void add_iter_flags(CLI::App* cmd, IterFlags& f) {
  cmd->add_option("--tool", f.tool, "tool id (see GET /tools)");
  cmd->add_option("--param", f.params, "tool parameter key=value, repeatable");
  cmd->add_option("--space", f.space, "narrowed outcome space in set grammar");
  cmd->add_option("--expect", f.expect, "expected set in set grammar");
  cmd->add_option("--p", f.p, "assessed probability of the expected set, in (0.5, 1)");
  cmd->add_option("--session", f.session, "session id; omitted means a throwaway session");
  cmd->add_option("--base", f.base, "bits or nats, for throwaway sessions")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infoiter: information accounting for iterative data analysis"};
  app.require_subcommand(1);
  Globals g;
  g.log_dir = env_or("INFOITER_LOG_DIR", "sessions");
  app.add_option("--precision", g.precision, "decimals for displayed numbers")->capture_default_str();
  app.add_flag("--json", g.json, "print the full-precision JSON envelope");
  app.add_option("--log-dir", g.log_dir, "session log directory (env INFOITER_LOG_DIR)")
      ->capture_default_str();

  std::function<void()> action;

  // session
  auto* session = app.add_subcommand("session", "create, inspect and replay sessions");
  session->require_subcommand(1);
  std::string new_id, new_base = "bits", summary_id, replay_path;
  auto* s_new = session->add_subcommand("new", "create a session");
  s_new->add_option("--id", new_id, "session id, generated when omitted");
  s_new->add_option("--base", new_base, "bits or nats")->capture_default_str();
  s_new->callback([&] {
    action = [&] {
      Api api = make_api(g.log_dir);
      Json req = {{"base", new_base}};
      if (!new_id.empty()) req["session_id"] = new_id;
      Json out = call(api, "POST", "/sessions", req);
      emit(g, out, [&] { std::cout << out.at("session_id").get<std::string>() << "\n"; });
    };
  });
  auto* s_list = session->add_subcommand("list", "list sessions in the log directory");
  s_list->callback([&] {
    action = [&] {
      Api api = make_api(g.log_dir);
      Json out = call(api, "GET", "/sessions", nullptr);
      emit(g, out, [&] {
        for (const auto& id : out.at("sessions")) std::cout << id.get<std::string>() << "\n";
      });
    };
  });
  auto* s_summary = session->add_subcommand("summary", "cumulative accounting of a session");
  s_summary->add_option("--session", summary_id, "session id")->required();
  s_summary->callback([&] {
    action = [&] {
      Api api = make_api(g.log_dir);
      Json out = call(api, "GET", "/sessions/" + summary_id + "/summary", nullptr);
      emit(g, out, [&] { print_summary(out, g.precision); });
    };
  });
  auto* s_replay = session->add_subcommand("replay", "re-verify a session log file");
  s_replay->add_option("--log", replay_path, "path to a .jsonl session log")->required();
  s_replay->callback([&] {
    action = [&] {
      Session s = replay(replay_path);
      Json out = summary_to_json(s.session_id(), s.base(), session_summary(s));
      emit(g, out, [&] {
        std::cout << "replay ok, " << s.records().size() << " records verified\n";
        print_summary(out, g.precision);
      });
    };
  });

  // iter
  auto* iter = app.add_subcommand("iter", "plan or run one iteration");
  iter->require_subcommand(1);
  IterFlags plan_flags;
  auto* i_plan = iter->add_subcommand("plan", "expected and anomaly gain before running");
  add_iter_flags(i_plan, plan_flags);
  i_plan->callback([&] {
    action = [&] {
      const bool persistent = !plan_flags.session.empty();
      Api api = make_api(persistent ? std::optional(g.log_dir) : std::nullopt);
      Json out = call(api, "POST",
                      persistent ? "/sessions/" + plan_flags.session + "/plan" : "/plan",
                      iter_request(plan_flags));
      emit(g, out, [&] {
        const std::string unit = out.at("base").get<std::string>();
        std::cout << "space     " << out.at("space").get<std::string>() << "\n"
                  << "expected  " << out.at("expected_set").get<std::string>() << "\n"
                  << "anomaly   " << out.at("anomaly_set").get<std::string>() << "\n"
                  << "H=" << fixed(out.at("h").get<double>(), g.precision) << " " << unit << "\n"
                  << "M=" << fixed(out.at("m").get<double>(), g.precision) << " " << unit << "\n";
      });
    };
  });
  IterFlags run_flags;
  std::string data_path;
  std::vector<std::string> schema;
  auto* i_run = iter->add_subcommand("run", "apply the tool to a CSV file and account for the result");
  add_iter_flags(i_run, run_flags);
  i_run->add_option("--data", data_path, "CSV file")->required();
  i_run->add_option("--schema", schema, "column kind hint name=integer|real|label, repeatable");
  i_run->add_option("--note", run_flags.note, "free-text note stored with the record");
  i_run->callback([&] {
    action = [&] {
      const bool persistent = !run_flags.session.empty();
      Api api = make_api(persistent ? std::optional(g.log_dir) : std::nullopt);
      std::string id = run_flags.session;
      if (!persistent) {
        id = call(api, "POST", "/sessions", Json{{"base", run_flags.base}}).at("session_id");
      }
      Json req = iter_request(run_flags);
      req["csv"] = read_file(data_path, ErrorCode::IngestError);
      if (!schema.empty()) req["schema"] = params_json(schema);
      Json out = call(api, "POST", "/sessions/" + id + "/iterations", req);
      emit(g, out, [&] {
        std::cout << "t         " << out.at("t").get<std::size_t>() << "\n"
                  << "observed  " << out.at("observed").dump() << "\n"
                  << "verdict   " << out.at("verdict").get<std::string>() << "\n"
                  << "G=" << fixed(out.at("g").get<double>(), g.precision) << "\n"
                  << "H=" << fixed(out.at("h").get<double>(), g.precision) << "\n"
                  << "S_G=" << fixed(out.at("s_g").get<double>(), g.precision)
                  << " S_H=" << fixed(out.at("s_h").get<double>(), g.precision) << "\n";
      });
    };
  });

  // choose
  std::string candidates_path, criterion = "both", choose_base = "bits";
  auto* choose = app.add_subcommand("choose", "rank candidate (tool, expected set, p) triples");
  choose->add_option("--candidates", candidates_path, "JSON file with a candidates array")->required();
  choose->add_option("--criterion", criterion, "expected, anomaly or both")->capture_default_str();
  choose->add_option("--base", choose_base, "bits or nats")->capture_default_str();
  choose->callback([&] {
    action = [&] {
      Api api = make_api(std::nullopt);
      Json file = Json::parse(read_file(candidates_path, ErrorCode::InvalidRequest));
      Json req = file.is_array() ? Json{{"candidates", file}} : file;
      req["base"] = choose_base;
      if (criterion != "both") {
        req["criterion"] = criterion;
      } else {
        req.erase("criterion");
      }
      Json out = call(api, "POST", "/rank", req);
      emit(g, out, [&] {
        if (out.contains("criterion")) {
          print_ranking(out, g.precision);
        } else {
          print_ranking(out.at("ExpectedGain"), g.precision);
          std::cout << "\n";
          print_ranking(out.at("AnomalyGain"), g.precision);
        }
      });
    };
  });

  // check-informative
  std::string ci_tool, h1, h2;
  std::vector<std::string> ci_params;
  std::size_t replicates = 1000;
  double alpha = 0.01;
  std::uint64_t ci_seed = 0;
  auto* check = app.add_subcommand("check-informative", "does the tool discriminate two hypotheses");
  check->add_option("--tool", ci_tool, "tool id")->required();
  check->add_option("--param", ci_params, "tool parameter key=value, repeatable");
  check->add_option("--h1", h1, "generator, e.g. poisson(lambda=2, n=200)")->required();
  check->add_option("--h2", h2, "generator for the alternative")->required();
  check->add_option("--replicates", replicates, "replicate datasets per hypothesis")->capture_default_str();
  check->add_option("--alpha", alpha, "test level")->capture_default_str();
  check->add_option("--seed", ci_seed, "base seed")->capture_default_str();
  check->callback([&] {
    action = [&] {
      Api api = make_api(std::nullopt);
      Json req = {{"tool", ci_tool}, {"params", params_json(ci_params)}, {"h1", h1}, {"h2", h2},
                  {"n_replicates", replicates}, {"alpha", alpha}, {"seed", ci_seed}};
      Json out = call(api, "POST", "/informativeness", req);
      emit(g, out, [&] {
        std::cout << "informative   " << (out.at("informative").get<bool>() ? "yes" : "no") << "\n"
                  << "method        " << out.at("method").get<std::string>() << "\n"
                  << "mean H1       " << fixed(out.at("mean_h1").get<double>(), g.precision) << "\n"
                  << "mean H2       " << fixed(out.at("mean_h2").get<double>(), g.precision) << "\n"
                  << "separation    " << fixed(out.at("ci_separation").get<double>(), g.precision) << "\n"
                  << "p-value       " << out.at("p_value").get<double>() << "\n";
      });
    };
  });

  // simulate
  std::string scenario_path, out_path, sim_kind = "gain_distribution", sim_expect = "{1}",
                                       sim_space = "{0,1}";
  std::optional<double> p_true, sim_p;
  std::size_t runs = 10000;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo checks of the gain accounting");
  simulate->add_option("--scenario", scenario_path, "scenario JSON file");
  simulate->add_option("--kind", sim_kind, "gain_distribution or theorems without a file")
      ->capture_default_str();
  simulate->add_option("--p-true", p_true, "true probability of the expected event");
  simulate->add_option("--p", sim_p, "analyst's assessed probability");
  simulate->add_option("--runs", runs, "number of runs")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "base seed")->capture_default_str();
  simulate->add_option("--out", out_path, "write the JSON report here");
  bool failed_assertions = false;
  simulate->callback([&] {
    action = [&] {
      Api api = make_api(std::nullopt);
      Json scenario;
      if (!scenario_path.empty()) {
        scenario = Json::parse(read_file(scenario_path, ErrorCode::InvalidRequest));
      } else if (sim_kind == "theorems") {
        scenario = {{"kind", "theorems"}};
      } else {
        if (!p_true || !sim_p) {
          throw Error(ErrorCode::InvalidRequest, "simulate needs --scenario or both --p-true and --p");
        }
        scenario = {{"kind", sim_kind},
                    {"n_runs", runs},
                    {"seed", sim_seed},
                    {"space", sim_space},
                    {"mechanism", {{"type", "bernoulli"}, {"p_true", *p_true}}},
                    {"analyst", {{"expect", sim_expect}, {"p", *sim_p}}}};
      }
      Json out = call(api, "POST", "/simulate", scenario);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw Error(ErrorCode::InvalidRequest, "cannot write '" + out_path + "'");
        f << out.dump(2) << "\n";
      }
      failed_assertions = !out.at("passed").get<bool>();
      emit(g, out, [&] {
        for (const auto& a : out.at("assertions")) {
          std::cout << (a.at("passed").get<bool>() ? "PASS  " : "FAIL  ")
                    << a.at("name").get<std::string>() << "  observed="
                    << fixed(a.at("observed").get<double>(), g.precision)
                    << " expected=" << fixed(a.at("expected").get<double>(), g.precision)
                    << " tol=" << fixed(a.at("tolerance").get<double>(), g.precision) << "\n";
        }
        std::cout << "checks " << out.at("checks_run").get<std::size_t>() << ", "
                  << (failed_assertions ? "FAILED" : "all passed") << "\n";
      });
    };
  });

  // serve
  std::string host = "127.0.0.1", static_dir = env_or("INFOITER_STATIC_DIR", "");
  int port = std::atoi(env_or("INFOITER_PORT", "8080").c_str());
  std::size_t upload_limit = kDefaultUploadLimit;
  auto* serve = app.add_subcommand("serve", "run the HTTP session API");
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--port", port, "port, 0 for any (env INFOITER_PORT)")->capture_default_str();
  serve->add_option("--static", static_dir, "directory of console assets served at /");
  serve->add_option("--upload-limit", upload_limit, "CSV upload limit in bytes")->capture_default_str();
  serve->callback([&] {
    action = [&] {
      ApiOptions opts;
      opts.log_dir = g.log_dir;
      opts.upload_limit = upload_limit;
      Api api(opts);
      HttpServer server(api, static_dir.empty() ? std::nullopt
                                                : std::optional<std::filesystem::path>(static_dir));
      int bound = server.bind(host, port);
      std::cout << "listening on http://" << host << ":" << bound << std::endl;
      server.listen();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    action();
  } catch (const Failure& f) {
    if (g.json) std::cout << f.envelope.dump(2) << "\n";
    std::cerr << "error: " << f.code << ": " << f.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidRequest: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << "\n";
    return 3;
  }
  return failed_assertions ? 1 : 0;
}
