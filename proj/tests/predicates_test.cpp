#include <gtest/gtest.h>

#include <bit>
#include <sstream>

#include "genpoly/errors.hpp"
#include "genpoly/predicates.hpp"
#include "genpoly/rng.hpp"

using namespace genpoly;

namespace {

std::vector<Rational> normalized(std::vector<Rational> w) {
  Rational total = 0;
  for (const auto& x : w) total += x;
  for (auto& x : w) x /= total;
  return w;
}

Predicate random_binary_predicate(int m, CounterRng& rng) {
  std::vector<Point> members;
  for (Index c = 0; c < (Index{1} << m); ++c) {
    if (rng.below(3) == 0) members.push_back(decode(c, m, 2));
  }
  if (members.empty()) members.push_back(decode(rng.below(Index{1} << m), m, 2));
  std::vector<Rational> w;
  for (std::size_t k = 0; k < members.size(); ++k) w.emplace_back(1 + static_cast<long>(rng.below(5)));
  return Predicate(m, 2, members, normalized(w));
}

// Random affine subspace of {0,1}^m: solutions of a few random parity checks.
Predicate random_affine_predicate(int m, CounterRng& rng) {
  std::vector<std::pair<std::uint64_t, int>> checks;
  int k = static_cast<int>(rng.below(3));
  for (int t = 0; t < k; ++t) checks.emplace_back(1 + rng.below((1u << m) - 1), static_cast<int>(rng.below(2)));
  std::vector<Point> members;
  for (Index c = 0; c < (Index{1} << m); ++c) {
    bool ok = true;
    for (auto [S, b] : checks) ok = ok && (std::popcount(c & S) & 1) == b;
    if (ok) members.push_back(decode(c, m, 2));
  }
  if (members.empty()) members.push_back(Point(m, 0));
  return Predicate::uniform(m, 2, members);
}

Rational R(long a, long b = 1) { return Rational(a, b); }

}  // namespace

TEST(ParseRational, ExactDecimals) {
  EXPECT_EQ(parse_rational("0.25"), R(1, 4));
  EXPECT_EQ(parse_rational("1/3"), R(1, 3));
  EXPECT_EQ(parse_rational("1e-3"), R(1, 1000));
  EXPECT_EQ(parse_rational("-2.5E1"), R(-25));
  EXPECT_EQ(parse_rational("0.1"), R(1, 10));
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
}

TEST(Validate, Examples) {
  auto P = builtin::parity(3, 0);
  auto r = validate(P);
  for (const auto& mj : r.marginals) {
    EXPECT_DOUBLE_EQ(mj[0], 0.5);
    EXPECT_DOUBLE_EQ(mj[1], 0.5);
  }
  EXPECT_DOUBLE_EQ(r.min_weight, 0.25);
  EXPECT_THROW(Predicate(2, 2, {{0, 0}, {1, 1}}, std::vector<double>{0.5, 0.49}), ValidationError);
  EXPECT_THROW(Predicate(2, 2, {{0, 0}, {0, 0}}, std::vector<double>{0.5, 0.5}), ValidationError);
  EXPECT_THROW(Predicate(2, 2, {}, std::vector<double>{}), ValidationError);
  EXPECT_THROW(Predicate(2, 2, {{0, 0}, {1, 1}}, std::vector<double>{1.0, 0.0}), ValidationError);
  EXPECT_THROW(Predicate(2, 2, {{0, 2}}, std::vector<double>{1.0}), ValidationError);
}

TEST(Project, Examples) {
  auto P = builtin::nand(3);
  std::vector<int> all{0, 1, 2};
  auto same = project(P, all);
  EXPECT_EQ(same.size(), P.size());
  for (int k = 0; k < P.size(); ++k) EXPECT_EQ(same.weight(same.index_of(P.member(k))), P.weight(k));

  auto nae = builtin::not_all_equal(3);
  std::vector<int> I{0, 1};
  auto pr = project(nae, I);
  ASSERT_EQ(pr.size(), 4);
  EXPECT_EQ(pr.exact_weights()[static_cast<std::size_t>(pr.index_of(Point{0, 0}))], R(1, 6));
  EXPECT_EQ(pr.exact_weights()[static_cast<std::size_t>(pr.index_of(Point{0, 1}))], R(1, 3));
  EXPECT_EQ(pr.exact_weights()[static_cast<std::size_t>(pr.index_of(Point{1, 0}))], R(1, 3));
  EXPECT_EQ(pr.exact_weights()[static_cast<std::size_t>(pr.index_of(Point{1, 1}))], R(1, 6));

  auto single = Predicate::uniform(3, 2, {{1, 0, 1}});
  std::vector<int> J{2};
  EXPECT_EQ(project(single, J).size(), 1);
}

TEST(AffineRelations, Examples) {
  auto p30 = affine_relations(builtin::parity(3, 0));
  ASSERT_EQ(p30.size(), 1u);
  EXPECT_EQ(p30[0], (AffineRelation{0b111, 0}));
  auto eq = affine_relations(builtin::equality(2));
  ASSERT_EQ(eq.size(), 1u);
  EXPECT_EQ(eq[0], (AffineRelation{0b11, 0}));
  EXPECT_TRUE(affine_relations(builtin::nand(2)).empty());
  EXPECT_THROW(affine_relations(builtin::full(2, 3)), UnsupportedError);
}

TEST(AffineRelations, ClosedUnderSymmetricDifference) {
  CounterRng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 2 + static_cast<int>(rng.below(4));
    auto P = trial % 2 ? random_binary_predicate(m, rng) : random_affine_predicate(m, rng);
    auto rel = affine_relations(P);
    auto has = [&](AffineRelation r) { return std::find(rel.begin(), rel.end(), r) != rel.end(); };
    for (const auto& a : rel) {
      for (const auto& b : rel) {
        if (a.support == b.support) continue;
        EXPECT_TRUE(has({a.support ^ b.support, a.offset ^ b.offset}));
      }
    }
    // Oracle: direct check of every listed relation and of completeness.
    for (std::uint64_t S = 1; S < (1u << m); ++S) {
      for (int b = 0; b < 2; ++b) {
        bool holds = true;
        for (const auto& w : P.members()) holds = holds && (std::popcount(encode(w, 2) & S) & 1) == b;
        EXPECT_EQ(holds, has({S, b}));
      }
    }
  }
}

TEST(ShortRelations, Examples) {
  auto dup = Predicate::uniform(3, 2, {{0, 0, 1}, {1, 1, 0}, {1, 1, 1}});
  auto r = classify_short_relations(dup);
  ASSERT_EQ(r.classes.size(), 2u);
  EXPECT_EQ(r.classes[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(r.negated[1], 0);

  auto zero = Predicate::uniform(3, 2, {{0, 1, 0}, {1, 0, 0}, {1, 1, 0}});
  auto rz = classify_short_relations(zero);
  EXPECT_EQ(rz.constant_value[2], 0);
  EXPECT_EQ(rz.representatives, (std::vector<int>{0, 1}));

  auto rp = classify_short_relations(builtin::parity(3, 0));
  EXPECT_EQ(rp.representatives, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(rp.constant_value, (std::vector<int>{-1, -1, -1}));

  auto neg = Predicate::uniform(2, 2, {{0, 1}, {1, 0}});
  auto rn = classify_short_relations(neg);
  EXPECT_EQ(rn.representative[1], 0);
  EXPECT_EQ(rn.negated[1], 1);
}

TEST(ShortRelations, ProjectionHasNoShortRelations) {
  CounterRng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 2 + static_cast<int>(rng.below(4));
    auto P = trial % 2 ? random_binary_predicate(m, rng) : random_affine_predicate(m, rng);
    auto r = classify_short_relations(P);
    if (r.representatives.empty()) continue;
    auto Q = project(P, r.representatives);
    for (const auto& rel : affine_relations(Q)) EXPECT_GE(std::popcount(rel.support), 3);
  }
}

TEST(Flexible, Examples) {
  for (const auto& f : flexible_coordinates(builtin::one_in_three())) EXPECT_FALSE(f.flexible);
  auto g = flexible_coordinates(builtin::nand_graph());
  EXPECT_TRUE(g[0].flexible);
  EXPECT_TRUE(g[1].flexible);
  EXPECT_FALSE(g[2].flexible);
  EXPECT_EQ(g[0].witness, (Point{0, 0, 1}));
  for (const auto& f : flexible_coordinates(builtin::full(3, 3))) {
    EXPECT_TRUE(f.flexible);
    EXPECT_EQ(f.witness, (Point{0, 0, 0}));
  }
}

TEST(Flexible, MonotoneWithoutConstantsIsFlexible) {
  CounterRng rng(3);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int m = 2 + static_cast<int>(rng.below(4));
    auto P = random_binary_predicate(m, rng);
    if (!is_monotone(P)) continue;
    auto r = classify_short_relations(P);
    bool constant = false;
    for (int v : r.constant_value) constant = constant || v >= 0;
    if (constant) continue;
    ++checked;
    for (const auto& f : flexible_coordinates(P)) EXPECT_TRUE(f.flexible);
  }
  // Down-closures of random sets give more monotone instances.
  for (int trial = 0; trial < 50; ++trial) {
    int m = 2 + static_cast<int>(rng.below(4));
    std::vector<bool> in(1u << m, false);
    for (int t = 0; t < 3; ++t) {
      auto top = rng.below(1u << m);
      for (Index c = 0; c < in.size(); ++c) {
        if ((c & ~top) == 0) in[c] = true;
      }
    }
    std::vector<Point> members;
    for (Index c = 0; c < in.size(); ++c) {
      if (in[c]) members.push_back(decode(c, m, 2));
    }
    auto P = Predicate::uniform(m, 2, members);
    ASSERT_TRUE(is_monotone(P));
    auto r = classify_short_relations(P);
    bool constant = false;
    for (int v : r.constant_value) constant = constant || v >= 0;
    if (constant) continue;
    ++checked;
    for (const auto& f : flexible_coordinates(P)) EXPECT_TRUE(f.flexible);
  }
  EXPECT_GT(checked, 10);
}

TEST(Maxterms, Examples) {
  EXPECT_EQ(maxterms(builtin::nand(4)), (std::vector<std::uint64_t>{0b1111}));
  EXPECT_TRUE(maxterms(builtin::full(3, 2)).empty());
  std::vector<Point> members;
  for (Index c = 0; c < 16; ++c) {
    auto w = decode(c, 4, 2);
    if (!(w[0] && w[1]) && !(w[2] && w[3])) members.push_back(w);
  }
  EXPECT_EQ(maxterms(Predicate::uniform(4, 2, members)), (std::vector<std::uint64_t>{0b0011, 0b1100}));
  EXPECT_THROW(maxterms(builtin::parity(3, 0)), DomainError);
}

TEST(StarLaw, BinaryNandTable) {
  Rational p(1, 5);
  auto P = builtin::nand2(p);
  Rational q(1, 50);
  auto law = star_law(P, StarMode::MonotoneNand, q);
  ASSERT_TRUE(law.is_exact());
  const auto& pats = law.patterns();
  ASSERT_EQ(pats.size(), 5u);
  // members in order (0,0), (1,0), (0,1), then stars at coordinates 1 and 2
  EXPECT_EQ(law.exact_probabilities()[0], 1 - 2 * p - 2 * (1 - p) * q);
  EXPECT_EQ(law.exact_probabilities()[1], p - p * q);
  EXPECT_EQ(law.exact_probabilities()[2], p - p * q);
  EXPECT_EQ(pats[3].star, 0);
  EXPECT_EQ(pats[3].base, (Point{0, 0}));
  EXPECT_EQ(pats[4].star, 1);
  EXPECT_EQ(law.exact_probabilities()[3], q);
  // General mode picks the same witnesses on a monotone predicate.
  auto general = star_law(P, StarMode::General, q);
  EXPECT_EQ(general.exact_probabilities(), law.exact_probabilities());
}

TEST(StarLaw, ZeroQIsMu) {
  auto P = builtin::nand(3);
  auto law = star_law(P, StarMode::General, Rational(0));
  ASSERT_EQ(law.patterns().size(), static_cast<std::size_t>(P.size()));
  for (int k = 0; k < P.size(); ++k) {
    EXPECT_EQ(law.patterns()[static_cast<std::size_t>(k)].star, -1);
    EXPECT_EQ(law.exact_probabilities()[static_cast<std::size_t>(k)], P.exact_weights()[static_cast<std::size_t>(k)]);
  }
}

TEST(StarLaw, TooLargeQNamesPattern) {
  auto P = builtin::nand2(Rational(1, 5));
  try {
    star_law(P, StarMode::General, Rational(1, 2));
    FAIL() << "expected an error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("w=00"), std::string::npos);
  }
}

TEST(StarLaw, InflexibleCoordinatesGetNoStars) {
  auto law = star_law(builtin::nand_graph());
  EXPECT_TRUE(law.starred(0));
  EXPECT_TRUE(law.starred(1));
  EXPECT_FALSE(law.starred(2));
  for (const auto& pat : law.patterns()) EXPECT_NE(pat.star, 2);
  auto none = star_law(builtin::one_in_three());
  for (const auto& pat : none.patterns()) EXPECT_EQ(pat.star, -1);
}

TEST(StarLaw, CompositionAndMarginalsExact) {
  CounterRng rng(4);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    int s = 2 + static_cast<int>(rng.below(2));
    int m = 2 + static_cast<int>(rng.below(2));
    std::vector<Point> members;
    Index codes = checked_power(s, m, kMaxTableSize);
    for (Index c = 0; c < codes; ++c) {
      if (rng.below(3) != 0) members.push_back(decode(c, m, s));
    }
    if (members.empty()) continue;
    std::vector<Rational> w;
    for (std::size_t k = 0; k < members.size(); ++k) w.emplace_back(1 + static_cast<long>(rng.below(7)));
    Predicate P(m, s, members, normalized(w));
    auto law = star_law(P);
    ++checked;
    Rational total = 0;
    for (const auto& x : law.exact_probabilities()) {
      EXPECT_GE(x, 0);
      total += x;
    }
    EXPECT_EQ(total, 1);
    auto comp = law.compose_exact(P);
    for (Index c = 0; c < codes; ++c) {
      int k = P.index_of(decode(c, m, s));
      EXPECT_EQ(comp[c], k >= 0 ? P.exact_weights()[static_cast<std::size_t>(k)] : Rational(0));
    }
    for (int j = 0; j < m; ++j) EXPECT_EQ(law.exact_conditional_marginal(j), P.exact_marginal(j));
    auto fcomp = law.compose(P);
    for (Index c = 0; c < codes; ++c) EXPECT_NEAR(fcomp[c], comp[c].convert_to<double>(), 1e-12);
  }
  EXPECT_GT(checked, 50);
}

TEST(StarLaw, FloatWeightsWithinTolerance) {
  Predicate P(2, 2, {{0, 0}, {1, 0}, {0, 1}}, std::vector<double>{0.6, 0.3, 0.1});
  auto law = star_law(P);
  EXPECT_FALSE(law.is_exact());
  for (int j = 0; j < 2; ++j) {
    auto cm = law.conditional_marginal(j);
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(cm[a], P.marginal(j)[a], 1e-12);
  }
}

TEST(PredicateFile, RoundTripAndBuiltins) {
  std::stringstream in("pred m=2 sigma=2\nw=00 p=0.6\nw=10 p=0.2\nw=01 p=1/5\n");
  auto P = read_predicate(in);
  ASSERT_TRUE(P.is_exact());
  EXPECT_EQ(P.exact_weights()[0], R(3, 5));
  std::stringstream out;
  write_predicate(out, P);
  auto Q = read_predicate(out);
  EXPECT_EQ(Q.exact_weights(), P.exact_weights());
  EXPECT_EQ(Q.members(), P.members());

  std::stringstream u("pred m=3\nw=100\nw=010\nw=001\n");
  EXPECT_EQ(read_predicate(u).weight(0), 1.0 / 3);

  std::stringstream b("pred builtin=parity m=3 b=0\n");
  EXPECT_EQ(read_predicate(b).size(), 4);
  std::stringstream bad("pred m=2\nw=00 p=0.5\nw=11\n");
  EXPECT_THROW(read_predicate(bad), ParseError);
  std::stringstream sym("pred m=2 sigma=3\nw=0,2\nw=2,1\n");
  EXPECT_EQ(read_predicate(sym).member(1), (Point{2, 1}));
}
