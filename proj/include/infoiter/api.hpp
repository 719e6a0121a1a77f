#pragma once

// JSON request handlers shared by the HTTP service and the CLI. Every
// response is an envelope {ok, payload | error{code, message}, engine_version}.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "infoiter/chooser.hpp"
#include "infoiter/dataset.hpp"
#include "infoiter/errors.hpp"
#include "infoiter/informativeness.hpp"
#include "infoiter/session_store.hpp"
#include "infoiter/sim.hpp"

namespace infoiter {

inline constexpr std::string_view kEngineVersion = "0.1.0";
inline constexpr std::size_t kDefaultUploadLimit = 16 * 1024 * 1024;

using Json = nlohmann::ordered_json;

struct ApiOptions {
  std::optional<std::filesystem::path> log_dir;
  std::size_t upload_limit = kDefaultUploadLimit;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

Json ok_envelope(Json payload);
Json error_envelope(ErrorCode code, const std::string& message);

Json scalar_to_json(const ScalarValue& v);
Json record_to_json(const IterationRecord& record);
Json summary_to_json(const std::string& session_id, LogBase base, const SessionSummary& summary);
Json ranking_to_json(const Ranking& ranking, const std::vector<CandidateTriple>& triples);
Json verdict_to_json(const InformativenessVerdict& verdict);

/// Tool spec from {tool, params?, space?}. Params may be strings or numbers.
ToolSpec tool_from_json(const Json& j, bool require_all = true,
                        const ToolRegistry& registry = ToolRegistry::builtin());
/// Declaration from {expect, p, note?} against the tool's declared space.
ExpectationDeclaration declaration_from_json(const ToolSpec& tool, const Json& j);

/// Scenario input for the simulator, see README for the shape.
SimReport run_simulation(const Json& scenario);

class Api {
 public:
  explicit Api(ApiOptions options = {});

  /// Routes one request. `body` is JSON except for POST /datasets, which
  /// takes raw CSV text. Never throws.
  ApiResponse dispatch(std::string_view method, std::string_view path, std::string_view body);

  /// Stores a CSV upload and returns its description (dataset_id, rows, columns).
  Json add_dataset(std::string_view csv_text);

  SessionStore& store() noexcept { return store_; }
  const ApiOptions& options() const noexcept { return options_; }

 private:
  Json create_session(const Json& req);
  Json list_sessions();
  Json summary(const std::string& id);
  Json plan(const std::optional<std::string>& id, const Json& req);
  Json run(const std::string& id, const Json& req);
  Json rank(const Json& req, LogBase base);
  Json informativeness(const Json& req);
  Json tools() const;

  std::shared_ptr<const Dataset> dataset_for(const Json& req);

  ApiOptions options_;
  SessionStore store_;
  std::shared_mutex datasets_mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
};

}  // namespace infoiter
