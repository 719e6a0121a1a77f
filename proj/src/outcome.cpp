#include "infoiter/outcome.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <type_traits>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

using Int = std::int64_t;

// Interval algebra shared by integer and real sets. A lower bound with
// `infinite` set is -inf, an upper bound with `infinite` set is +inf.
template <typename T>
struct Bound {
  bool infinite = false;
  T value{};
  bool closed = false;
};

template <typename T>
struct Span {
  Bound<T> lo;
  Bound<T> hi;
};

template <typename T>
bool lo_less(const Bound<T>& a, const Bound<T>& b) {
  if (a.infinite != b.infinite) return a.infinite;
  if (a.infinite) return false;
  if (a.value != b.value) return a.value < b.value;
  return a.closed && !b.closed;
}

template <typename T>
bool hi_less(const Bound<T>& a, const Bound<T>& b) {
  if (a.infinite != b.infinite) return b.infinite;
  if (a.infinite) return false;
  if (a.value != b.value) return a.value < b.value;
  return !a.closed && b.closed;
}

template <typename T>
bool is_empty(const Span<T>& s) {
  if (s.lo.infinite || s.hi.infinite) return false;
  if (s.lo.value < s.hi.value) return false;
  if (s.lo.value > s.hi.value) return true;
  return !(s.lo.closed && s.hi.closed);
}

// Integers: rewrite open finite ends as closed ones. Returns false if the
// span became empty.
bool close_integer_span(Span<Int>& s) {
  constexpr Int kMax = std::numeric_limits<Int>::max();
  constexpr Int kMin = std::numeric_limits<Int>::min();
  if (s.lo.infinite) {
    s.lo.closed = false;
  } else if (!s.lo.closed) {
    if (s.lo.value == kMax) return false;
    ++s.lo.value;
    s.lo.closed = true;
  }
  if (s.hi.infinite) {
    s.hi.closed = false;
  } else if (!s.hi.closed) {
    if (s.hi.value == kMin) return false;
    --s.hi.value;
    s.hi.closed = true;
  }
  return !is_empty(s);
}

template <typename T>
bool touches(const Bound<T>& cur_hi, const Bound<T>& next_lo) {
  if (cur_hi.infinite || next_lo.infinite) return true;
  if constexpr (std::is_integral_v<T>) {
    if (next_lo.value == std::numeric_limits<T>::min()) return true;
    return cur_hi.value >= next_lo.value - 1;
  } else {
    if (cur_hi.value > next_lo.value) return true;
    if (cur_hi.value < next_lo.value) return false;
    return cur_hi.closed || next_lo.closed;
  }
}

template <typename T>
std::vector<Span<T>> canonical(std::vector<Span<T>> spans) {
  std::vector<Span<T>> kept;
  kept.reserve(spans.size());
  for (auto& s : spans) {
    if constexpr (std::is_integral_v<T>) {
      if (!close_integer_span(s)) continue;
    } else {
      if (s.lo.infinite) s.lo.closed = false;
      if (s.hi.infinite) s.hi.closed = false;
      if (is_empty(s)) continue;
    }
    kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Span<T>& a, const Span<T>& b) { return lo_less(a.lo, b.lo); });
  std::vector<Span<T>> merged;
  for (const auto& s : kept) {
    if (!merged.empty() && touches(merged.back().hi, s.lo)) {
      if (hi_less(merged.back().hi, s.hi)) merged.back().hi = s.hi;
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

template <typename T>
std::vector<Span<T>> difference(const std::vector<Span<T>>& a, const std::vector<Span<T>>& b) {
  std::vector<Span<T>> out;
  for (const auto& piece0 : a) {
    std::vector<Span<T>> pieces{piece0};
    for (const auto& cut : b) {
      std::vector<Span<T>> next;
      for (const auto& piece : pieces) {
        if (!cut.lo.infinite) {
          Bound<T> edge{false, cut.lo.value, !cut.lo.closed};
          Span<T> left{piece.lo, hi_less(piece.hi, edge) ? piece.hi : edge};
          if (!is_empty(left)) next.push_back(left);
        }
        if (!cut.hi.infinite) {
          Bound<T> edge{false, cut.hi.value, !cut.hi.closed};
          Span<T> right{lo_less(piece.lo, edge) ? edge : piece.lo, piece.hi};
          if (!is_empty(right)) next.push_back(right);
        }
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return canonical(std::move(out));
}

template <typename T>
bool span_contains(const Span<T>& s, T y) {
  bool above = s.lo.infinite || y > s.lo.value || (y == s.lo.value && s.lo.closed);
  bool below = s.hi.infinite || y < s.hi.value || (y == s.hi.value && s.hi.closed);
  return above && below;
}

Span<Int> to_span(const IntegerRange& r) {
  return {{!r.lo.has_value(), r.lo.value_or(0), r.lo.has_value()},
          {!r.hi.has_value(), r.hi.value_or(0), r.hi.has_value()}};
}

IntegerRange from_span(const Span<Int>& s) {
  IntegerRange r;
  if (!s.lo.infinite) r.lo = s.lo.value;
  if (!s.hi.infinite) r.hi = s.hi.value;
  return r;
}

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

Span<double> to_span(const RealInterval& r) {
  if (std::isnan(r.lo) || std::isnan(r.hi)) {
    throw Error(ErrorCode::SetSyntaxError, "real interval endpoint is NaN");
  }
  Span<double> s;
  s.lo = {std::isinf(r.lo) && r.lo < 0, clean_zero(r.lo), r.lo_closed};
  s.hi = {std::isinf(r.hi) && r.hi > 0, clean_zero(r.hi), r.hi_closed};
  // +inf as a lower end or -inf as an upper end leaves nothing.
  if ((std::isinf(r.lo) && r.lo > 0) || (std::isinf(r.hi) && r.hi < 0)) {
    s.lo = {false, 1.0, false};
    s.hi = {false, 0.0, false};
  }
  return s;
}

RealInterval from_span(const Span<double>& s) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return {s.lo.infinite ? -kInf : s.lo.value, s.hi.infinite ? kInf : s.hi.value,
          !s.lo.infinite && s.lo.closed, !s.hi.infinite && s.hi.closed};
}

template <typename Out, typename In>
std::vector<Out> convert(const std::vector<In>& in) {
  std::vector<Out> out;
  out.reserve(in.size());
  for (const auto& x : in) {
    if constexpr (std::is_same_v<Out, Span<Int>> || std::is_same_v<Out, Span<double>>) {
      out.push_back(to_span(x));
    } else {
      out.push_back(from_span(x));
    }
  }
  return out;
}

std::string format_double_plain(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), clean_zero(v));
  return std::string(buf, res.ptr);
}

std::string quote_label(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string kind_list(ScalarKind a, ScalarKind b) {
  return std::string(scalar_kind_name(a)) + " vs " + std::string(scalar_kind_name(b));
}

}  // namespace

// Grants the free functions access to OutcomeSet internals.
struct SetAccess {
  static OutcomeSet make_int(std::vector<Span<Int>> spans, bool enumerated) {
    OutcomeSet s;
    s.kind_ = ScalarKind::Integer;
    s.ints_ = convert<IntegerRange>(spans);
    s.enumerated_ = enumerated;
    return s;
  }
  static OutcomeSet make_real(std::vector<Span<double>> spans) {
    OutcomeSet s;
    s.kind_ = ScalarKind::Real;
    s.reals_ = convert<RealInterval>(spans);
    return s;
  }
  static OutcomeSet make_label(std::vector<std::string> labels) {
    OutcomeSet s;
    s.kind_ = ScalarKind::Label;
    s.labels_ = std::move(labels);
    return s;
  }
};

namespace {

struct Accumulator {
  std::optional<ScalarKind> hint;
  std::optional<ScalarKind> kind;
  std::vector<Span<Int>> ints;
  std::vector<Span<double>> reals;
  std::vector<std::string> labels;
  bool all_enumerated = true;

  void set_kind(ScalarKind k) {
    if (hint && *hint != k) {
      throw Error(ErrorCode::KindMismatch, "set member kind " + kind_list(k, *hint));
    }
    if (kind && *kind != k) {
      throw Error(ErrorCode::KindMismatch, "mixed scalar kinds in set: " + kind_list(*kind, k));
    }
    kind = k;
  }

  void add(const SetExpr& e) {
    std::visit([this](const auto& v) { add_member(v); }, static_cast<const SetExpr::variant&>(e));
  }

  void add_member(const FiniteSet& f) {
    for (const auto& m : f.members) {
      if (const auto* i = std::get_if<Int>(&m)) {
        if (hint == ScalarKind::Real) {
          set_kind(ScalarKind::Real);
          double v = static_cast<double>(*i);
          reals.push_back({{false, v, true}, {false, v, true}});
        } else {
          set_kind(ScalarKind::Integer);
          ints.push_back({{false, *i, true}, {false, *i, true}});
        }
      } else if (const auto* d = std::get_if<double>(&m)) {
        set_kind(ScalarKind::Real);
        if (!std::isfinite(*d)) {
          throw Error(ErrorCode::SetSyntaxError, "finite set members must be finite reals");
        }
        reals.push_back({{false, clean_zero(*d), true}, {false, clean_zero(*d), true}});
      } else {
        set_kind(ScalarKind::Label);
        labels.push_back(std::get<std::string>(m));
      }
    }
  }

  void add_member(const IntegerRange& r) {
    set_kind(ScalarKind::Integer);
    all_enumerated = false;
    ints.push_back(to_span(r));
  }

  void add_member(const RealInterval& r) {
    set_kind(ScalarKind::Real);
    reals.push_back(to_span(r));
  }

  void add_member(const UnionOf& u) {
    for (const auto& m : u.members) add(m);
  }
};

template <typename T>
std::vector<Span<T>> spans_of(const OutcomeSet& s);

template <>
std::vector<Span<Int>> spans_of<Int>(const OutcomeSet& s) {
  return convert<Span<Int>>(s.integer_ranges());
}

template <>
std::vector<Span<double>> spans_of<double>(const OutcomeSet& s) {
  return convert<Span<double>>(s.real_intervals());
}

void require_same_kind(const OutcomeSet& a, const OutcomeSet& b) {
  if (a.kind() != b.kind()) {
    throw Error(ErrorCode::KindMismatch, "set kinds differ: " + kind_list(a.kind(), b.kind()));
  }
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SetExpr parse_all() {
    SetExpr e = parse_set();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SetSyntaxError,
                what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t after = pos_ + kw.size();
    // Keywords are followed by a bracket, never by more identifier characters.
    if (after < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[after])) ||
                                 text_[after] == '_')) {
      return false;
    }
    pos_ = after;
    return true;
  }

  SetExpr parse_set() {
    skip_ws();
    if (peek('{')) return parse_finite();
    if (keyword("union")) {
      expect('(');
      UnionOf u;
      u.members.push_back(parse_set());
      while (peek(',')) {
        ++pos_;
        u.members.push_back(parse_set());
      }
      expect(')');
      return u;
    }
    if (keyword("int")) return parse_int_range();
    if (keyword("real")) return parse_real_interval();
    fail("expected a set");
  }

  std::string raw_token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
           text_[pos_] != ']' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected a value");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated label");
    ++pos_;
    return out;
  }

  ScalarValue scalar() {
    if (peek('"')) return quoted();
    std::string tok = raw_token();
    if (auto i = as_int(tok)) return *i;
    if (auto d = as_real(tok)) {
      if (!std::isfinite(*d)) fail("infinite values are not set members");
      return *d;
    }
    bool ident = std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_';
    for (char c : tok) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
        ident = false;
      }
    }
    if (!ident || tok == "inf") fail("invalid set member '" + tok + "'");
    return tok;
  }

  SetExpr parse_finite() {
    expect('{');
    FiniteSet f;
    if (!peek('}')) {
      f.members.push_back(scalar());
      while (peek(',')) {
        ++pos_;
        f.members.push_back(scalar());
      }
    }
    expect('}');
    return f;
  }

  bool open_bracket() {
    skip_ws();
    if (peek('[')) { ++pos_; return true; }
    if (peek('(')) { ++pos_; return false; }
    fail("expected '[' or '('");
  }

  bool close_bracket() {
    if (peek(']')) { ++pos_; return true; }
    if (peek(')')) { ++pos_; return false; }
    fail("expected ']' or ')'");
  }

  static int infinity_sign(const std::string& tok) {
    if (tok == "inf" || tok == "+inf") return 1;
    if (tok == "-inf") return -1;
    return 0;
  }

  SetExpr parse_int_range() {
    bool lo_closed = open_bracket();
    std::string lo_tok = raw_token();
    expect(',');
    std::string hi_tok = raw_token();
    bool hi_closed = close_bracket();
    Span<Int> s;
    if (int sign = infinity_sign(lo_tok)) {
      if (sign > 0) fail("lower bound cannot be +inf");
      s.lo = {true, 0, false};
    } else if (auto v = as_int(lo_tok)) {
      s.lo = {false, *v, lo_closed};
    } else {
      fail("integer bound expected, got '" + lo_tok + "'");
    }
    if (int sign = infinity_sign(hi_tok)) {
      if (sign < 0) fail("upper bound cannot be -inf");
      s.hi = {true, 0, false};
    } else if (auto v = as_int(hi_tok)) {
      s.hi = {false, *v, hi_closed};
    } else {
      fail("integer bound expected, got '" + hi_tok + "'");
    }
    if (!close_integer_span(s)) {
      // Keep the empty range representable; normalize reports it.
      return IntegerRange{Int{1}, Int{0}};
    }
    return from_span(s);
  }

  SetExpr parse_real_interval() {
    bool lo_closed = open_bracket();
    std::string lo_tok = raw_token();
    expect(',');
    std::string hi_tok = raw_token();
    bool hi_closed = close_bracket();
    auto bound = [&](const std::string& tok) -> double {
      if (int sign = infinity_sign(tok)) return sign * std::numeric_limits<double>::infinity();
      if (auto i = as_int(tok)) return static_cast<double>(*i);
      if (auto d = as_real(tok)) return *d;
      fail("real bound expected, got '" + tok + "'");
    };
    return RealInterval{bound(lo_tok), bound(hi_tok), lo_closed, hi_closed};
  }

 public:
  static std::optional<Int> as_int(std::string_view tok) {
    if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
    Int v{};
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
  }

  static std::optional<double> as_real(std::string_view tok) {
    if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    double v{};
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || std::isnan(v)) {
      return std::nullopt;
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view scalar_kind_name(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::Integer: return "integer";
    case ScalarKind::Real: return "real";
    case ScalarKind::Label: return "label";
  }
  return "unknown";
}

ScalarKind kind_of(const ScalarValue& value) {
  switch (value.index()) {
    case 0: return ScalarKind::Integer;
    case 1: return ScalarKind::Real;
    default: return ScalarKind::Label;
  }
}

std::string format_scalar(const ScalarValue& value) {
  if (const auto* i = std::get_if<Int>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) {
    std::string s = format_double_plain(*d);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
  }
  return quote_label(std::get<std::string>(value));
}

std::string_view verdict_name(EventVerdict verdict) {
  return verdict == EventVerdict::AsExpected ? "AsExpected" : "Unexpected";
}

EventVerdict parse_verdict(std::string_view text) {
  if (text == "AsExpected") return EventVerdict::AsExpected;
  if (text == "Unexpected") return EventVerdict::Unexpected;
  throw Error(ErrorCode::InvalidRequest, "unknown verdict '" + std::string(text) + "'");
}

bool OutcomeSet::is_finite() const {
  switch (kind_) {
    case ScalarKind::Integer:
      return std::all_of(ints_.begin(), ints_.end(),
                         [](const IntegerRange& r) { return r.lo && r.hi; });
    case ScalarKind::Real:
      return std::all_of(reals_.begin(), reals_.end(),
                         [](const RealInterval& r) { return r.lo == r.hi; });
    case ScalarKind::Label:
      return true;
  }
  return false;
}

std::optional<std::vector<ScalarValue>> OutcomeSet::members(std::size_t limit) const {
  if (!is_finite()) return std::nullopt;
  std::vector<ScalarValue> out;
  switch (kind_) {
    case ScalarKind::Integer:
      for (const auto& r : ints_) {
        for (Int v = *r.lo;; ++v) {
          if (out.size() >= limit) return std::nullopt;
          out.emplace_back(v);
          if (v == *r.hi) break;
        }
      }
      break;
    case ScalarKind::Real:
      if (reals_.size() > limit) return std::nullopt;
      for (const auto& r : reals_) out.emplace_back(r.lo);
      break;
    case ScalarKind::Label:
      if (labels_.size() > limit) return std::nullopt;
      for (const auto& l : labels_) out.emplace_back(l);
      break;
  }
  return out;
}

bool operator==(const OutcomeSet& a, const OutcomeSet& b) {
  return a.kind_ == b.kind_ && a.ints_ == b.ints_ && a.reals_ == b.reals_ && a.labels_ == b.labels_;
}

OutcomeSet normalize(const SetExpr& raw, std::optional<ScalarKind> kind_hint) {
  Accumulator acc;
  acc.hint = kind_hint;
  acc.add(raw);
  if (!acc.kind) throw Error(ErrorCode::EmptySpace, "outcome set is empty");
  switch (*acc.kind) {
    case ScalarKind::Integer: {
      auto spans = canonical(std::move(acc.ints));
      if (spans.empty()) throw Error(ErrorCode::EmptySpace, "outcome set is empty");
      return SetAccess::make_int(std::move(spans), acc.all_enumerated);
    }
    case ScalarKind::Real: {
      auto spans = canonical(std::move(acc.reals));
      if (spans.empty()) throw Error(ErrorCode::EmptySpace, "outcome set is empty");
      return SetAccess::make_real(std::move(spans));
    }
    case ScalarKind::Label: {
      std::sort(acc.labels.begin(), acc.labels.end());
      acc.labels.erase(std::unique(acc.labels.begin(), acc.labels.end()), acc.labels.end());
      return SetAccess::make_label(std::move(acc.labels));
    }
  }
  throw Error(ErrorCode::EmptySpace, "outcome set is empty");
}

bool contains(const OutcomeSet& set, const ScalarValue& y) {
  if (kind_of(y) != set.kind()) {
    throw Error(ErrorCode::KindMismatch,
                "value " + format_scalar(y) + " compared with set: " +
                    kind_list(kind_of(y), set.kind()));
  }
  switch (set.kind()) {
    case ScalarKind::Integer: {
      Int v = std::get<Int>(y);
      for (const auto& r : set.integer_ranges()) {
        if (span_contains(to_span(r), v)) return true;
      }
      return false;
    }
    case ScalarKind::Real: {
      double v = std::get<double>(y);
      if (!std::isfinite(v)) return false;
      for (const auto& r : set.real_intervals()) {
        if (span_contains(to_span(r), v)) return true;
      }
      return false;
    }
    case ScalarKind::Label: {
      const auto& labels = set.labels();
      return std::binary_search(labels.begin(), labels.end(), std::get<std::string>(y));
    }
  }
  return false;
}

std::optional<OutcomeSet> set_difference(const OutcomeSet& a, const OutcomeSet& b) {
  require_same_kind(a, b);
  switch (a.kind()) {
    case ScalarKind::Integer: {
      auto d = difference(spans_of<Int>(a), spans_of<Int>(b));
      if (d.empty()) return std::nullopt;
      return SetAccess::make_int(std::move(d), a.enumerated());
    }
    case ScalarKind::Real: {
      auto d = difference(spans_of<double>(a), spans_of<double>(b));
      if (d.empty()) return std::nullopt;
      return SetAccess::make_real(std::move(d));
    }
    case ScalarKind::Label: {
      std::vector<std::string> d;
      std::set_difference(a.labels().begin(), a.labels().end(), b.labels().begin(),
                          b.labels().end(), std::back_inserter(d));
      if (d.empty()) return std::nullopt;
      return SetAccess::make_label(std::move(d));
    }
  }
  return std::nullopt;
}

bool is_subset(const OutcomeSet& a, const OutcomeSet& b) {
  return !set_difference(a, b).has_value();
}

bool is_strict_subset(const OutcomeSet& e, const OutcomeSpace& space) {
  return is_subset(e, space) && !(e == space);
}

OutcomeSet complement_within(const OutcomeSet& e, const OutcomeSpace& space) {
  require_same_kind(e, space);
  if (!is_strict_subset(e, space)) {
    throw Error(ErrorCode::InvalidExpectedSet,
                "expected set " + to_string(e) + " is not a strict subset of " + to_string(space));
  }
  return *set_difference(space, e);
}

EventVerdict classify(const OutcomeSet& e, const OutcomeSpace& space, const ScalarValue& y) {
  require_same_kind(e, space);
  if (!is_strict_subset(e, space)) {
    throw Error(ErrorCode::InvalidExpectedSet,
                "expected set " + to_string(e) + " is not a strict subset of " + to_string(space));
  }
  if (!contains(space, y)) {
    throw Error(ErrorCode::ModelViolation,
                "observed output " + format_scalar(y) + " lies outside the outcome space " +
                    to_string(space));
  }
  return contains(e, y) ? EventVerdict::AsExpected : EventVerdict::Unexpected;
}

std::string to_string(const OutcomeSet& set) {
  std::vector<std::string> parts;
  auto join = [](const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += sep;
      out += items[i];
    }
    return out;
  };
  switch (set.kind()) {
    case ScalarKind::Integer:
      if (set.enumerated()) {
        if (auto members = set.members()) {
          for (const auto& v : *members) parts.push_back(format_scalar(v));
          return "{" + join(parts, ",") + "}";
        }
      }
      for (const auto& r : set.integer_ranges()) {
        std::string s = "int";
        s += r.lo ? "[" + std::to_string(*r.lo) : std::string("(-inf");
        s += ",";
        s += r.hi ? std::to_string(*r.hi) + "]" : std::string("inf)");
        parts.push_back(std::move(s));
      }
      break;
    case ScalarKind::Real:
      if (set.is_finite()) {
        for (const auto& r : set.real_intervals()) parts.push_back(format_scalar(r.lo));
        return "{" + join(parts, ",") + "}";
      }
      for (const auto& r : set.real_intervals()) {
        if (r.lo == r.hi) {
          parts.push_back("{" + format_scalar(r.lo) + "}");
          continue;
        }
        parts.push_back("real" + std::string(r.lo_closed ? "[" : "(") + format_double_plain(r.lo) +
                        "," + format_double_plain(r.hi) + (r.hi_closed ? "]" : ")"));
      }
      break;
    case ScalarKind::Label:
      for (const auto& l : set.labels()) parts.push_back(quote_label(l));
      return "{" + join(parts, ",") + "}";
  }
  if (parts.size() == 1) return parts.front();
  return "union(" + join(parts, ", ") + ")";
}

SetExpr parse_set_expr(std::string_view text) { return Parser(text).parse_all(); }

OutcomeSet parse_set(std::string_view text, std::optional<ScalarKind> kind_hint) {
  return normalize(parse_set_expr(text), kind_hint);
}

ScalarValue parse_scalar(std::string_view text, ScalarKind kind) {
  switch (kind) {
    case ScalarKind::Integer:
      if (auto v = Parser::as_int(text)) return *v;
      break;
    case ScalarKind::Real:
      if (auto v = Parser::as_real(text); v && std::isfinite(*v)) return clean_zero(*v);
      break;
    case ScalarKind::Label:
      if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
          if (text[i] == '\\' && i + 2 < text.size()) ++i;
          out.push_back(text[i]);
        }
        return out;
      }
      return std::string(text);
  }
  throw Error(ErrorCode::KindMismatch,
              "'" + std::string(text) + "' is not a " + std::string(scalar_kind_name(kind)));
}

}  // namespace infoiter
