#pragma once

// Ranking candidate (tool, expected set, assessment) triples before any of
// them is applied. The expected-gain criterion favours assessments near 0.5,
// the anomaly-gain criterion favours assessments near 1, so the two
// orderings are reversed whenever the assessments differ.

#include <string_view>
#include <vector>

#include "infoiter/info.hpp"
#include "infoiter/session.hpp"

namespace infoiter {

enum class Criterion { ExpectedGain, AnomalyGain };

std::string_view criterion_name(Criterion c);
Criterion parse_criterion(std::string_view text);

struct CandidateTriple {
  ToolSpec tool;
  ExpectationDeclaration declaration;
  std::size_t j = 0;
};

struct RankEntry {
  std::size_t j = 0;
  double score = 0.0;
};

struct Ranking {
  Criterion criterion = Criterion::ExpectedGain;
  std::vector<RankEntry> entries;  // non-increasing score
  std::size_t chosen = 0;
};

/// Scores closer than this are ties, broken by the lower candidate index.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Throws EmptyCandidates for an empty list; every triple is re-validated.
Ranking score_triples(const std::vector<CandidateTriple>& triples, Criterion criterion,
                      LogBase base = LogBase::Bits);

struct ProfileRow {
  double p_hat = 0.0;
  double h_expected = 0.0;
  double m_anomaly = 0.0;
};

/// Rows sorted by p_hat. Throws InvalidAssessment for points outside (0.5, 1).
std::vector<ProfileRow> criterion_profile(std::vector<double> p_grid, LogBase base = LogBase::Bits);

}  // namespace infoiter
