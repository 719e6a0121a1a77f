#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "infoiter/session.hpp"

namespace infoiter {

/// Thread-safe collection of sessions, optionally backed by a directory of
/// `<session_id>.jsonl` logs. Mutations of one session are serialized and
/// each iteration line is appended to the log before the in-memory session
/// changes, so a crash leaves the log and memory consistent. Reads return
/// snapshots. Sessions found in the directory are replayed on first access.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> log_dir = std::nullopt,
                        const ToolRegistry& registry = ToolRegistry::builtin());

  /// Throws InvalidRequest for a malformed or duplicate id. An empty id is
  /// replaced by a generated one.
  std::string create(std::string session_id = "", LogBase base = LogBase::Bits);

  bool exists(const std::string& session_id);
  std::vector<std::string> list();

  /// Throws NotFound.
  Session snapshot(const std::string& session_id);
  SessionSummary summary(const std::string& session_id);

  PlanSummary plan(const std::string& session_id, const ToolSpec& tool,
                   const ExpectationDeclaration& declaration);

  /// Same error contract as run_iteration.
  IterationRecord run(const std::string& session_id, const ToolSpec& tool,
                      const ExpectationDeclaration& declaration, const Dataset& data);

  std::optional<std::filesystem::path> log_path(const std::string& session_id) const;

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> entry(const std::string& session_id);
  void append_line(const std::string& session_id, const std::string& line);

  std::optional<std::filesystem::path> dir_;
  const ToolRegistry& registry_;
  std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// Session ids are 1 to 64 characters from [A-Za-z0-9_-].
bool valid_session_id(const std::string& id);

}  // namespace infoiter
