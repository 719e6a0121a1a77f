#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "infoiter/outcome.hpp"
#include "test_util.hpp"

using namespace infoiter;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarValue I(std::int64_t v) { return v; }

OutcomeSet S(const char* text) { return parse_set(text); }

SetExpr random_int_expr(std::mt19937_64& rng, int lo, int hi, int max_parts) {
  std::uniform_int_distribution<int> parts(1, max_parts);
  std::uniform_int_distribution<int> point(lo, hi);
  std::uniform_int_distribution<int> shape(0, 5);
  UnionOf u;
  int n = parts(rng);
  for (int i = 0; i < n; ++i) {
    int a = point(rng), b = point(rng);
    if (a > b) std::swap(a, b);
    switch (shape(rng)) {
      case 0: u.members.push_back(IntegerRange{std::nullopt, b}); break;
      case 1: u.members.push_back(IntegerRange{a, std::nullopt}); break;
      case 2: u.members.push_back(FiniteSet{{I(a), I(b), I(a)}}); break;
      default: u.members.push_back(IntegerRange{a, b}); break;
    }
  }
  return u;
}

SetExpr random_real_expr(std::mt19937_64& rng, int max_parts) {
  std::uniform_int_distribution<int> parts(1, max_parts);
  std::uniform_int_distribution<int> point(-8, 8);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> shape(0, 6);
  UnionOf u;
  int n = parts(rng);
  for (int i = 0; i < n; ++i) {
    double a = point(rng) / 2.0, b = point(rng) / 2.0;
    if (a > b) std::swap(a, b);
    bool lc = coin(rng), hc = coin(rng);
    if (a == b) lc = hc = true;
    switch (shape(rng)) {
      case 0: u.members.push_back(RealInterval{-kInf, b, false, hc}); break;
      case 1: u.members.push_back(RealInterval{a, kInf, lc, false}); break;
      case 2: u.members.push_back(FiniteSet{{ScalarValue(a), ScalarValue(b)}}); break;
      default: u.members.push_back(RealInterval{a, b, lc, hc}); break;
    }
  }
  return u;
}

}  // namespace

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize(UnionOf{{IntegerRange{0, 5}, IntegerRange{3, 9}}}),
            normalize(IntegerRange{0, 9}));
  EXPECT_EQ(to_string(normalize(UnionOf{{IntegerRange{0, 5}, IntegerRange{3, 9}}})), "int[0,9]");
  EXPECT_EQ(to_string(normalize(UnionOf{{RealInterval{0, 1, true, false}, RealInterval{1, 2, true, true}}})),
            "real[0,2]");
  OutcomeSet signs = normalize(FiniteSet{{I(1), I(0), I(-1), I(1)}});
  EXPECT_EQ(to_string(signs), "{-1,0,1}");
  EXPECT_EQ(*signs.members(), (std::vector<ScalarValue>{I(-1), I(0), I(1)}));
}

TEST(Normalize, AdjacentIntegersMergeButOpenRealsDoNot) {
  EXPECT_EQ(to_string(S("union(int[0,3], int[4,6])")), "int[0,6]");
  EXPECT_EQ(to_string(S("union(real[0,1), real(1,2])")), "union(real[0,1), real(1,2])");
  EXPECT_EQ(to_string(S("union(real[0,1), {1.0}, real(1,2])")), "real[0,2]");
  EXPECT_EQ(to_string(S("int[0,10)")), "int[0,9]");
}

TEST(Normalize, Errors) {
  expect_code(ErrorCode::EmptySpace, [] { normalize(FiniteSet{}); });
  expect_code(ErrorCode::EmptySpace, [] { normalize(IntegerRange{5, 4}); });
  expect_code(ErrorCode::EmptySpace, [] { normalize(RealInterval{1, 1, true, false}); });
  expect_code(ErrorCode::KindMismatch, [] { normalize(FiniteSet{{I(1), ScalarValue(std::string("a"))}}); });
  expect_code(ErrorCode::KindMismatch, [] {
    normalize(UnionOf{{IntegerRange{0, 1}, RealInterval{0, 1, true, true}}});
  });
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(normalize(IntegerRange{0, std::nullopt}), I(1000)));
  EXPECT_FALSE(contains(S("{1000}"), I(998)));
  EXPECT_FALSE(contains(normalize(RealInterval{0, kInf, true, false}), ScalarValue(-4.0)));
}

TEST(Contains, ExactEndpoints) {
  OutcomeSet half_open = S("real[0,1)");
  EXPECT_TRUE(contains(half_open, ScalarValue(0.0)));
  EXPECT_FALSE(contains(half_open, ScalarValue(1.0)));
  EXPECT_TRUE(contains(half_open, ScalarValue(std::nextafter(1.0, 0.0))));
  EXPECT_FALSE(contains(half_open, ScalarValue(-0.0 - 1e-300)));
}

TEST(Contains, KindMismatch) {
  expect_code(ErrorCode::KindMismatch, [] { contains(S("{1,2}"), ScalarValue(1.0)); });
  expect_code(ErrorCode::KindMismatch, [] { contains(S("{\"a\"}"), ScalarValue(1.0)); });
}

TEST(StrictSubset, Examples) {
  OutcomeSet naturals = S("int[0,inf)");
  EXPECT_TRUE(is_strict_subset(S("{1000}"), naturals));
  EXPECT_FALSE(is_strict_subset(naturals, naturals));
  EXPECT_TRUE(is_strict_subset(S("{1}"), S("{-1,0,1}")));
  EXPECT_FALSE(is_strict_subset(S("{2}"), S("{-1,0,1}")));
  expect_code(ErrorCode::KindMismatch, [] { is_strict_subset(S("{1}"), S("real[0,1]")); });
}

TEST(StrictSubset, EnumeratedAndRangeFormsAreTheSameSet) {
  EXPECT_EQ(S("{0,1,2}"), S("int[0,2]"));
  EXPECT_FALSE(is_strict_subset(S("{0,1,2}"), S("int[0,2]")));
}

TEST(Complement, Examples) {
  EXPECT_EQ(to_string(complement_within(S("{1}"), S("{-1,0,1}"))), "{-1,0}");
  OutcomeSet c = complement_within(S("{1000}"), S("int[0,inf)"));
  EXPECT_EQ(to_string(c), "union(int[0,999], int[1001,inf))");
  EXPECT_EQ(c, normalize(UnionOf{{IntegerRange{0, 999}, IntegerRange{1001, std::nullopt}}}));
  EXPECT_EQ(to_string(complement_within(S("real(0,1]"), S("real(0,2]"))), "real(1,2]");
}

TEST(Complement, Errors) {
  expect_code(ErrorCode::InvalidExpectedSet, [] { complement_within(S("{-1,0,1}"), S("{-1,0,1}")); });
  expect_code(ErrorCode::InvalidExpectedSet, [] { complement_within(S("{5}"), S("{-1,0,1}")); });
}

TEST(Classify, Examples) {
  OutcomeSet naturals = S("int[0,inf)");
  EXPECT_EQ(classify(S("{1000}"), naturals, I(1000)), EventVerdict::AsExpected);
  EXPECT_EQ(classify(S("{1}"), S("{-1,0,1}"), I(-1)), EventVerdict::Unexpected);
  expect_code(ErrorCode::ModelViolation, [&] { classify(S("{1000}"), naturals, I(-3)); });
}

TEST(Classify, RejectsInvalidDeclarations) {
  expect_code(ErrorCode::InvalidExpectedSet, [] { classify(S("{-1,0,1}"), S("{-1,0,1}"), I(0)); });
}

TEST(Labels, AlwaysFinite) {
  OutcomeSet colours = S("{\"red\",\"green\",\"blue\"}");
  EXPECT_EQ(colours.kind(), ScalarKind::Label);
  EXPECT_EQ(to_string(colours), "{\"blue\",\"green\",\"red\"}");
  EXPECT_EQ(to_string(complement_within(S("{\"red\"}"), colours)), "{\"blue\",\"green\"}");
  EXPECT_EQ(classify(S("{\"red\"}"), colours, ScalarValue(std::string("blue"))),
            EventVerdict::Unexpected);
}

TEST(Grammar, Errors) {
  for (const char* bad : {"", "{", "{1,}", "int[0,", "[0,1]", "real[2,1]x", "union()", "{a b}",
                          "int[0.5,2]", "real[inf,0]", "int[3,-inf]", "{inf}", "{1,\"a\"}"}) {
    try {
      parse_set(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::SetSyntaxError || e.code() == ErrorCode::EmptySpace ||
                  e.code() == ErrorCode::KindMismatch)
          << bad << ": " << e.code_name();
    }
  }
}

TEST(Grammar, LenientInput) {
  // Bare words are labels and infinite ends are open however they are
  // bracketed; the printer always emits the canonical spelling.
  EXPECT_EQ(to_string(S("{b, a}")), "{\"a\",\"b\"}");
  EXPECT_EQ(to_string(S("int[-inf,3]")), "int(-inf,3]");
  EXPECT_EQ(to_string(S(" union( {1} ,int[ 2 , 4 ] ) ")), "int[1,4]");
}

TEST(Grammar, KindHints) {
  EXPECT_EQ(to_string(parse_set("{1.5, 2}", ScalarKind::Real)), "{1.5,2.0}");
  EXPECT_EQ(parse_scalar("7", ScalarKind::Integer), I(7));
  EXPECT_EQ(parse_scalar("7", ScalarKind::Real), ScalarValue(7.0));
  EXPECT_EQ(format_scalar(ScalarValue(2.0)), "2.0");
  expect_code(ErrorCode::KindMismatch, [] { parse_set("{1}", ScalarKind::Label); });
}

TEST(Grammar, QuotedLabelsRoundTrip) {
  OutcomeSet s = S("{\"a, b\",\"say \\\"hi\\\"\"}");
  EXPECT_EQ(s.labels().size(), 2u);
  EXPECT_EQ(parse_set(to_string(s)), s);
  EXPECT_EQ(to_string(parse_set(to_string(s))), to_string(s));
}

TEST(OutcomeProperties, PartitionIntegers) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> point(-40, 40);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    OutcomeSet space = normalize(random_int_expr(rng, -30, 30, 4));
    auto e = set_difference(space, normalize(random_int_expr(rng, -30, 30, 3)));
    if (!e || !is_strict_subset(*e, space)) continue;
    OutcomeSet comp = complement_within(*e, space);
    for (int k = 0; k < 50; ++k) {
      ScalarValue y = I(point(rng));
      if (!contains(space, y)) {
        expect_code(ErrorCode::ModelViolation, [&] { classify(*e, space, y); });
        continue;
      }
      EXPECT_NE(contains(*e, y), contains(comp, y));
      EXPECT_EQ(classify(*e, space, y) == EventVerdict::AsExpected, contains(*e, y));
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(OutcomeProperties, PartitionReals) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> point(-20, 20);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    OutcomeSet space = normalize(random_real_expr(rng, 4));
    auto e = set_difference(space, normalize(random_real_expr(rng, 3)));
    if (!e || !is_strict_subset(*e, space)) continue;
    OutcomeSet comp = complement_within(*e, space);
    for (int k = 0; k < 50; ++k) {
      // Quarter steps hit every endpoint and every gap between them.
      ScalarValue y = point(rng) / 4.0;
      if (!contains(space, y)) continue;
      EXPECT_NE(contains(*e, y), contains(comp, y)) << to_string(*e) << " in " << to_string(space);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(OutcomeProperties, NormalizeIdempotentAndOrderFree) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    SetExpr raw = trial % 2 ? random_int_expr(rng, -20, 20, 5) : random_real_expr(rng, 5);
    OutcomeSet once = normalize(raw);
    OutcomeSet twice = normalize(parse_set_expr(to_string(once)));
    EXPECT_EQ(once, twice);
    EXPECT_EQ(to_string(once), to_string(twice));
    auto& members = std::get<UnionOf>(raw).members;
    std::shuffle(members.begin(), members.end(), rng);
    EXPECT_EQ(normalize(raw), once);
  }
}

TEST(OutcomeProperties, ComplementInvolution) {
  std::mt19937_64 rng(14);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const bool ints = trial % 2;
    OutcomeSet space = normalize(ints ? random_int_expr(rng, -20, 20, 4) : random_real_expr(rng, 4));
    auto e = set_difference(space, normalize(ints ? random_int_expr(rng, -20, 20, 2) : random_real_expr(rng, 2)));
    if (!e || !is_strict_subset(*e, space)) continue;
    OutcomeSet back = complement_within(complement_within(*e, space), space);
    EXPECT_EQ(back, *e) << to_string(*e) << " in " << to_string(space);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(OutcomeProperties, SubsetMatchesBruteForce) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_int_distribution<int> value(0, 24);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::set<std::int64_t> space_pts, e_pts;
    int n = size(rng);
    while (static_cast<int>(space_pts.size()) < n) space_pts.insert(value(rng));
    for (auto v : space_pts) {
      if (coin(rng)) e_pts.insert(v);
    }
    if (coin(rng)) e_pts.insert(value(rng));  // may fall outside the space
    if (e_pts.empty()) continue;
    FiniteSet fs, fe;
    for (auto v : space_pts) fs.members.push_back(I(v));
    for (auto v : e_pts) fe.members.push_back(I(v));
    std::shuffle(fe.members.begin(), fe.members.end(), rng);
    OutcomeSet space = normalize(fs), e = normalize(fe);
    const bool subset = std::includes(space_pts.begin(), space_pts.end(), e_pts.begin(), e_pts.end());
    EXPECT_EQ(is_subset(e, space), subset);
    EXPECT_EQ(is_strict_subset(e, space), subset && e_pts != space_pts);
  }
}

TEST(OutcomeProperties, SubsetMatchesBruteForceLabels) {
  std::mt19937_64 rng(16);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::set<std::string> sp, ep;
    for (const auto& w : words) {
      if (coin(rng)) sp.insert(w);
      if (coin(rng)) ep.insert(w);
    }
    if (sp.empty() || ep.empty()) continue;
    FiniteSet fs, fe;
    for (const auto& w : sp) fs.members.emplace_back(w);
    for (const auto& w : ep) fe.members.emplace_back(w);
    const bool subset = std::includes(sp.begin(), sp.end(), ep.begin(), ep.end());
    EXPECT_EQ(is_strict_subset(normalize(fe), normalize(fs)), subset && sp != ep);
  }
}

TEST(OutcomeProperties, PrintParseRoundTrip) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    OutcomeSet s = normalize(trial % 2 ? random_int_expr(rng, -1000, 1000, 6) : random_real_expr(rng, 6));
    const std::string text = to_string(s);
    OutcomeSet back = parse_set(text);
    EXPECT_EQ(back, s) << text;
    EXPECT_EQ(to_string(back), text);
  }
}
