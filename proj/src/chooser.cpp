#include "infoiter/chooser.hpp"

#include <algorithm>
#include <string>

#include "infoiter/errors.hpp"

namespace infoiter {

std::string_view criterion_name(Criterion c) {
  return c == Criterion::ExpectedGain ? "ExpectedGain" : "AnomalyGain";
}

Criterion parse_criterion(std::string_view text) {
  if (text == "ExpectedGain" || text == "expected") return Criterion::ExpectedGain;
  if (text == "AnomalyGain" || text == "anomaly") return Criterion::AnomalyGain;
  throw Error(ErrorCode::InvalidRequest, "unknown criterion '" + std::string(text) + "'");
}

Ranking score_triples(const std::vector<CandidateTriple>& triples, Criterion criterion,
                      LogBase base) {
  if (triples.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidate triples to rank");
  std::vector<RankEntry> pending;
  pending.reserve(triples.size());
  for (const auto& c : triples) {
    validate_declaration(c.tool, c.declaration);
    const auto& a = c.declaration.assessment;
    pending.push_back({c.j, criterion == Criterion::ExpectedGain ? expected_gain(a, base)
                                                                 : anomaly_gain(a, base)});
  }

  // Selection order: the best remaining score, and among scores within the
  // tie tolerance of it, the lowest index.
  Ranking r;
  r.criterion = criterion;
  while (!pending.empty()) {
    double best = pending.front().score;
    for (const auto& e : pending) best = std::max(best, e.score);
    auto pick = pending.end();
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      if (it->score >= best - kScoreTieTolerance && (pick == pending.end() || it->j < pick->j)) {
        pick = it;
      }
    }
    r.entries.push_back(*pick);
    pending.erase(pick);
  }
  r.chosen = r.entries.front().j;
  return r;
}

std::vector<ProfileRow> criterion_profile(std::vector<double> p_grid, LogBase base) {
  std::vector<ProfileRow> rows;
  rows.reserve(p_grid.size());
  std::sort(p_grid.begin(), p_grid.end());
  for (double p : p_grid) {
    ProbabilityAssessment a(p);
    rows.push_back({p, expected_gain(a, base), anomaly_gain(a, base)});
  }
  return rows;
}

}  // namespace infoiter
