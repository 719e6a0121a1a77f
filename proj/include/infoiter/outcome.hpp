#pragma once

// Outcome sets over scalar tool outputs.
//
// A tool's complete outcome space, the analyst's expected set E, and the
// anomaly set (space minus E) all share one normalized representation. Three
// scalar kinds are supported: integers, reals and category labels. Sets never
// mix kinds.
//
// Textual grammar (whitespace is insignificant):
//
//   set      := finite | irange | rinterval | union
//   finite   := '{' [ scalar { ',' scalar } ] '}'
//   irange   := 'int'  open bound ',' bound close
//   rinterval:= 'real' open bound ',' bound close
//   union    := 'union' '(' set { ',' set } ')'
//   open     := '[' | '('          close := ']' | ')'
//   bound    := number | 'inf' | '+inf' | '-inf'
//   scalar   := integer | real | '"' chars '"' | identifier
//
// Canonical printing: integer sets built only from finite enumerations print
// as `{-1,0,1}`; other integer sets print as closed ranges `int[0,999]`,
// `int[0,inf)`. Real intervals print with their exact endpoint closure,
// `real(0,1]`; infinite endpoints are always open. Labels are always quoted.
// Multi-member sets print as `union(a, b, ...)` in ascending order.
// For any set s, parse_set(to_string(s), s.kind()) == s and printing the
// result reproduces the same text.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace infoiter {

enum class ScalarKind { Integer, Real, Label };

std::string_view scalar_kind_name(ScalarKind kind);

using ScalarValue = std::variant<std::int64_t, double, std::string>;

ScalarKind kind_of(const ScalarValue& value);

/// Literal form used by the set grammar: reals always carry a '.' or an
/// exponent, labels are quoted.
std::string format_scalar(const ScalarValue& value);

/// Inclusive integer range; nullopt bounds are unbounded.
struct IntegerRange {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;

  friend bool operator==(const IntegerRange&, const IntegerRange&) = default;
};

/// Real interval; lo may be -inf and hi may be +inf (those ends are open).
struct RealInterval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  friend bool operator==(const RealInterval&, const RealInterval&) = default;
};

struct FiniteSet {
  std::vector<ScalarValue> members;
};

struct SetExpr;

struct UnionOf {
  std::vector<SetExpr> members;
};

/// Unnormalized set expression, as written by a user or built in code.
struct SetExpr : std::variant<FiniteSet, IntegerRange, RealInterval, UnionOf> {
  using variant::variant;
};

/// A normalized, nonempty outcome set.
class OutcomeSet {
 public:
  ScalarKind kind() const noexcept { return kind_; }

  /// Integer sets: sorted, pairwise non-adjacent closed ranges.
  const std::vector<IntegerRange>& integer_ranges() const noexcept { return ints_; }
  /// Real sets: sorted, pairwise disjoint, non-touching intervals.
  const std::vector<RealInterval>& real_intervals() const noexcept { return reals_; }
  /// Label sets: sorted distinct labels.
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// True for integer sets that print in brace form.
  bool enumerated() const noexcept { return enumerated_; }

  bool is_finite() const;

  /// Members in ascending order when the set is finite with at most `limit`
  /// elements.
  std::optional<std::vector<ScalarValue>> members(std::size_t limit = 1 << 20) const;

  /// Semantic equality; the print flavour of integer sets is ignored.
  friend bool operator==(const OutcomeSet& a, const OutcomeSet& b);

 private:
  friend struct SetAccess;

  ScalarKind kind_ = ScalarKind::Integer;
  std::vector<IntegerRange> ints_;
  std::vector<RealInterval> reals_;
  std::vector<std::string> labels_;
  bool enumerated_ = false;
};

/// The complete potential outcome set of a tool.
using OutcomeSpace = OutcomeSet;

enum class EventVerdict { AsExpected, Unexpected };

std::string_view verdict_name(EventVerdict verdict);
EventVerdict parse_verdict(std::string_view text);

/// Throws EmptySpace for an empty result and KindMismatch for mixed kinds.
/// With a kind hint, bare numeric literals are read as that kind.
OutcomeSet normalize(const SetExpr& raw, std::optional<ScalarKind> kind_hint = std::nullopt);

/// Throws KindMismatch when y's kind differs from the set's. Real membership
/// honours endpoint closure exactly.
bool contains(const OutcomeSet& set, const ScalarValue& y);

bool is_subset(const OutcomeSet& a, const OutcomeSet& b);

/// Every member of e lies in space and e != space.
bool is_strict_subset(const OutcomeSet& e, const OutcomeSpace& space);

/// a minus b; nullopt when empty. Integer results keep a's print flavour.
std::optional<OutcomeSet> set_difference(const OutcomeSet& a, const OutcomeSet& b);

/// space minus e. Throws InvalidExpectedSet unless e is a strict subset.
OutcomeSet complement_within(const OutcomeSet& e, const OutcomeSpace& space);

/// Throws ModelViolation when y falls outside the space.
EventVerdict classify(const OutcomeSet& e, const OutcomeSpace& space, const ScalarValue& y);

std::string to_string(const OutcomeSet& set);

/// Throws SetSyntaxError on malformed text, plus the normalize errors.
SetExpr parse_set_expr(std::string_view text);
OutcomeSet parse_set(std::string_view text, std::optional<ScalarKind> kind_hint = std::nullopt);

/// Reads a scalar literal of a known kind ("12", "2.5", "-inf" is rejected,
/// labels may be bare or quoted).
ScalarValue parse_scalar(std::string_view text, ScalarKind kind);

}  // namespace infoiter
