#include "infoiter/session_store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

std::string generate_id() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  std::uint64_t r = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ (++counter << 48);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "s%016llx", static_cast<unsigned long long>(r));
  return buf;
}

}  // namespace

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> log_dir, const ToolRegistry& registry)
    : dir_(std::move(log_dir)), registry_(registry) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<std::filesystem::path> SessionStore::log_path(const std::string& session_id) const {
  if (!dir_) return std::nullopt;
  return *dir_ / (session_id + ".jsonl");
}

std::string SessionStore::create(std::string session_id, LogBase base) {
  if (session_id.empty()) session_id = generate_id();
  if (!valid_session_id(session_id)) {
    throw Error(ErrorCode::InvalidRequest, "invalid session id '" + session_id + "'");
  }
  std::unique_lock lock(map_mutex_);
  auto path = log_path(session_id);
  if (sessions_.count(session_id) || (path && std::filesystem::exists(*path))) {
    throw Error(ErrorCode::InvalidRequest, "session '" + session_id + "' already exists");
  }
  auto e = std::make_shared<Entry>();
  e->session = Session(session_id, base);
  if (path) {
    std::ofstream out(*path, std::ios::binary);
    out << serialize_header(e->session) << "\n";
    if (!out) throw Error(ErrorCode::InvalidRequest, "cannot write session log " + path->string());
  }
  sessions_[session_id] = std::move(e);
  return session_id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& session_id) {
  {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(session_id);
    if (it != sessions_.end()) return it->second;
  }
  auto path = valid_session_id(session_id) ? log_path(session_id) : std::nullopt;
  if (!path || !std::filesystem::exists(*path)) {
    throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");
  }
  std::unique_lock lock(map_mutex_);
  auto it = sessions_.find(session_id);
  if (it != sessions_.end()) return it->second;
  auto e = std::make_shared<Entry>();
  e->session = replay(*path, registry_);
  sessions_[session_id] = e;
  return e;
}

bool SessionStore::exists(const std::string& session_id) {
  try {
    entry(session_id);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFound) return false;
    throw;
  }
}

std::vector<std::string> SessionStore::list() {
  std::vector<std::string> ids;
  {
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, _] : sessions_) ids.push_back(id);
  }
  if (dir_) {
    for (const auto& f : std::filesystem::directory_iterator(*dir_)) {
      if (f.path().extension() != ".jsonl") continue;
      std::string id = f.path().stem().string();
      if (valid_session_id(id) && std::find(ids.begin(), ids.end(), id) == ids.end()) {
        ids.push_back(id);
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Session SessionStore::snapshot(const std::string& session_id) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  return e->session;
}

SessionSummary SessionStore::summary(const std::string& session_id) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  return session_summary(e->session);
}

PlanSummary SessionStore::plan(const std::string& session_id, const ToolSpec& tool,
                               const ExpectationDeclaration& declaration) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  return plan_iteration(e->session, tool, declaration);
}

void SessionStore::append_line(const std::string& session_id, const std::string& line) {
  auto path = log_path(session_id);
  if (!path) return;
  std::ofstream out(*path, std::ios::binary | std::ios::app);
  out << line << "\n";
  out.flush();
  if (!out) throw Error(ErrorCode::InvalidRequest, "cannot append to session log " + path->string());
}

IterationRecord SessionStore::run(const std::string& session_id, const ToolSpec& tool,
                                  const ExpectationDeclaration& declaration, const Dataset& data) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  auto outcome = evaluate_iteration(e->session, tool, declaration, data);
  if (auto* v = std::get_if<ViolationEvent>(&outcome)) {
    append_line(session_id, serialize_violation(e->session, *v));
    e->session.commit(*v);
    throw Error(ErrorCode::ModelViolation, v->message);
  }
  const auto& record = std::get<IterationRecord>(outcome);
  append_line(session_id, serialize_record(e->session, record));
  e->session.commit(record);
  return record;
}

}  // namespace infoiter
