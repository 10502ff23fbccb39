#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "genpoly/corrector.hpp"
#include "genpoly/errors.hpp"
#include "genpoly/experiment.hpp"
#include "genpoly/polytest.hpp"
#include "genpoly/rng.hpp"

using namespace genpoly;

namespace {

FunctionTable random_bits(int n, CounterRng& rng, double p = 0.5) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = rng.bernoulli(p) ? 1.0 : 0.0;
  return FunctionTable(n, 2, Codomain::Bit, std::move(v));
}

FunctionTable flip_some(const FunctionTable& f, double rate, CounterRng& rng, Index* flipped = nullptr) {
  std::vector<double> v(f.values().begin(), f.values().end());
  Index count = 0;
  for (auto& x : v) {
    if (rng.bernoulli(rate)) {
      x = 1.0 - x;
      ++count;
    }
  }
  if (flipped) *flipped = count;
  return f.with_values(std::move(v));
}

/// Brute-force minimum of Pr_nu[f != chi_{S,b}] over every (S, b).
double brute_min_character_distance(const FunctionTable& f, const ProductMeasure& nu) {
  double best = 2.0;
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << f.n()); ++S) {
    for (int b = 0; b < 2; ++b) best = std::min(best, distance(f, Character{S, b}.table(f.n()), nu));
  }
  return best;
}

/// Relabels coordinates: g(x) = f(y) with y_{perm[i]} = x_i.
FunctionTable permute(const FunctionTable& f, std::span<const int> perm) {
  std::vector<double> v(f.size());
  for (Index x = 0; x < f.size(); ++x) {
    Index y = 0;
    for (int i = 0; i < f.n(); ++i) y |= ((x >> i) & 1U) << perm[static_cast<std::size_t>(i)];
    v[x] = f[y];
  }
  return f.with_values(std::move(v));
}

Matrix lazy_chain(double a) { return Matrix{2, {1 - a, a, a, 1 - a}}; }

/// Full transition matrix of the product chain over Y^n.
Matrix kronecker(const TransitionChain& c) {
  const int y = c.alphabet_size();
  const int n = c.n();
  int size = 1;
  for (int i = 0; i < n; ++i) size *= y;
  Matrix out{size, std::vector<double>(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 1.0)};
  for (int a = 0; a < size; ++a) {
    for (int b = 0; b < size; ++b) {
      double w = 1.0;
      int aa = a, bb = b;
      for (int i = 0; i < n; ++i, aa /= y, bb /= y) w *= c.factors()[static_cast<std::size_t>(c.psi()[static_cast<std::size_t>(i)])](aa % y, bb % y);
      out.entries[static_cast<std::size_t>(a * size + b)] = w;
    }
  }
  return out;
}

/// Pr[f(x) != f(y)] with x uniform and y drawn from the product chain, by
/// summing over every pair.
double brute_disagreement(const TransitionChain& c, const FunctionTable& f) {
  auto M = kronecker(c);
  double d = 0.0;
  for (int a = 0; a < M.size; ++a) {
    for (int b = 0; b < M.size; ++b) {
      if (f.symbol(static_cast<Index>(a)) != f.symbol(static_cast<Index>(b))) d += M(a, b) / M.size;
    }
  }
  return d;
}

std::vector<FunctionTable> copies(const FunctionTable& f, int m) { return std::vector<FunctionTable>(static_cast<std::size_t>(m), f); }

bool pointwise_le(const FunctionTable& g, const FunctionTable& f) {
  for (Index x = 0; x < f.size(); ++x) {
    if (g[x] > f[x]) return false;
  }
  return true;
}

bool is_character(const FunctionTable& g, std::uint64_t S) {
  return g == Character{S, 0}.table(g.n()) || g == Character{S, 1}.table(g.n());
}

}  // namespace

TEST(CharacterDecoding, BlrExamples) {
  auto chi = make::character(6, std::vector<int>{1, 3}, 1);
  auto fit = blr_decode_uniform(chi);
  EXPECT_EQ(fit.chi, (Character{0b1010, 1}));
  EXPECT_EQ(fit.distance, 0.0);
  EXPECT_EQ(fit.max_coefficient, 1.0);

  auto maj = blr_decode_uniform(make::majority(3));
  EXPECT_EQ(maj.chi, (Character{0b001, 0}));
  EXPECT_DOUBLE_EQ(maj.distance, 0.25);
  EXPECT_DOUBLE_EQ(maj.max_coefficient, 0.5);
}

TEST(CharacterDecoding, BlrRecoversPlantedCharacter) {
  const int n = 12;
  for (int t = 0; t < 20; ++t) {
    CounterRng rng(derive_seed(11, static_cast<std::uint64_t>(t)));
    Character chi{rng.below(std::uint64_t{1} << n), static_cast<int>(rng.below(2))};
    Index flipped = 0;
    auto f = flip_some(chi.table(n), 0.05, rng, &flipped);
    auto fit = blr_decode_uniform(f);
    EXPECT_EQ(fit.chi, chi);
    EXPECT_EQ(fit.distance, static_cast<double>(flipped) / static_cast<double>(f.size()));
  }
}

TEST(CharacterDecoding, NearestCharacterMatchesBruteForce) {
  for (int t = 0; t < 30; ++t) {
    CounterRng rng(derive_seed(12, static_cast<std::uint64_t>(t)));
    const int n = 1 + static_cast<int>(rng.below(7));
    auto f = random_bits(n, rng, 0.2 + 0.6 * rng.uniform());
    auto nu = ProductMeasure::biased(n, 0.1 + 0.8 * rng.uniform());
    auto fit = nearest_character(f, nu);
    EXPECT_NEAR(fit.distance, brute_min_character_distance(f, nu), 1e-12);
    EXPECT_NEAR(fit.distance, distance(f, fit.chi.table(n), nu), 1e-15);
  }
}

TEST(CharacterDecoding, NearestCharacterAgreesWithBlrUnderUniform) {
  for (int t = 0; t < 30; ++t) {
    CounterRng rng(derive_seed(13, static_cast<std::uint64_t>(t)));
    const int n = 1 + static_cast<int>(rng.below(10));
    auto f = random_bits(n, rng);
    auto blr = blr_decode_uniform(f);
    auto near = nearest_character(f, ProductMeasure::uniform(n, 2));
    EXPECT_NEAR(blr.distance, near.distance, 1e-12);
  }
}

TEST(CharacterDecoding, NearestCharacterExamples) {
  auto nu = ProductMeasure::biased(5, 0.3);
  auto zero = nearest_character(make::constant(5, 2, Codomain::Bit, 0), nu);
  EXPECT_EQ(zero.chi, (Character{0, 0}));
  EXPECT_EQ(zero.distance, 0.0);
  auto one = nearest_character(make::constant(5, 2, Codomain::Bit, 1), nu);
  EXPECT_EQ(one.chi, (Character{0, 1}));
  Character chi{0b10110, 1};
  auto fit = nearest_character(chi.table(5), nu);
  EXPECT_EQ(fit.chi, chi);
  EXPECT_NEAR(fit.distance, 0.0, 1e-15);
}

TEST(CharacterDecoding, DistanceIsPermutationInvariant) {
  for (int t = 0; t < 20; ++t) {
    CounterRng rng(derive_seed(14, static_cast<std::uint64_t>(t)));
    const int n = 2 + static_cast<int>(rng.below(6));
    auto f = random_bits(n, rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    auto nu = ProductMeasure::biased(n, 0.35);
    EXPECT_NEAR(nearest_character(f, nu).distance, nearest_character(permute(f, perm), nu).distance, 1e-12);
  }
}

TEST(CharacterDecoding, BlrDistanceBoundedByParityViolation) {
  const auto P = builtin::parity(3, 0);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    CounterRng rng(derive_seed(15, static_cast<std::uint64_t>(t)));
    const int n = 8;
    Character chi{rng.below(std::uint64_t{1} << n), 0};
    auto f = flip_some(chi.table(n), 0.002 + 0.013 * rng.uniform(), rng);
    auto fs = copies(f, 3);
    double delta = violation_exact(P, fs).probability;
    if (delta > 0.05) continue;
    ++checked;
    EXPECT_LE(blr_decode_uniform(f).distance, delta + 1e-12);
  }
  EXPECT_GT(checked, 20);
}

TEST(Peeling, ParityPredicate) {
  const auto P = builtin::parity(3, 0);
  CounterRng rng(21);
  Character chi{0b0100101, 0};
  std::vector<FunctionTable> fs;
  for (int j = 0; j < 3; ++j) fs.push_back(flip_some(chi.table(7), 0.02, rng));
  auto r = peel_affine_relations(P, fs);
  ASSERT_EQ(r.steps.size(), 1U);
  EXPECT_EQ(r.steps[0].relation, (AffineRelation{0b111, 0}));
  EXPECT_EQ(r.steps[0].deactivated, 2);
  EXPECT_TRUE(r.F.empty());
  EXPECT_EQ(r.I, (std::vector<int>{0, 1}));
  for (int j = 0; j < 3; ++j) {
    ASSERT_TRUE(r.characters[static_cast<std::size_t>(j)]);
    EXPECT_EQ(r.characters[static_cast<std::size_t>(j)]->chi, chi);
  }
  EXPECT_TRUE(r.conflicts.empty());
  EXPECT_TRUE(r.unique_extension);
}

TEST(Peeling, NoRelations) {
  const auto P = builtin::nand(3);
  auto fs = copies(make::dictator(4, 0), 3);
  auto r = peel_affine_relations(P, fs);
  EXPECT_EQ(r.F, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(r.I, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(r.steps.empty());
  EXPECT_TRUE(r.unique_extension);
}

TEST(Peeling, RejectsShortRelations) {
  EXPECT_THROW(peel_affine_relations(builtin::equality(2), copies(make::dictator(3, 0), 2)), DomainError);
}

TEST(Peeling, ExtensionByCharactersIsExact) {
  // Any polymorphism of P|_I extended by the decoded characters is one of P.
  const auto P = builtin::parity(3, 1);
  const int n = 5;
  CounterRng rng(22);
  for (int t = 0; t < 10; ++t) {
    Character chi{rng.below(std::uint64_t{1} << n), 0};
    // The columns xor to the all-ones input, so the outputs xor to
    // |S| + b1 + b2 + b3 mod 2, which must be 1.
    int b1 = static_cast<int>(rng.below(2)), b2 = static_cast<int>(rng.below(2));
    int b3 = (1 + std::popcount(chi.support) + b1 + b2) & 1;
    std::vector<FunctionTable> fs{Character{chi.support, b1}.table(n), Character{chi.support, b2}.table(n),
                                  Character{chi.support, b3}.table(n)};
    auto r = peel_affine_relations(P, fs);
    ASSERT_EQ(r.I, (std::vector<int>{0, 1}));
    std::vector<FunctionTable> gs = fs;
    for (int j = 0; j < 3; ++j) gs[static_cast<std::size_t>(j)] = r.characters[static_cast<std::size_t>(j)]->chi.table(n);
    EXPECT_EQ(is_generalized_polymorphism(P, fs).holds, is_generalized_polymorphism(P, gs).holds);
  }
}

TEST(Markov, SecondEigenvalueExamples) {
  EXPECT_NEAR(second_eigenvalue(Matrix{3, std::vector<double>(9, 1.0 / 3)}), 0.0, 1e-12);
  EXPECT_NEAR(second_eigenvalue(Matrix{2, {1, 0, 0, 1}}), 1.0, 1e-12);
  for (double a : {0.1, 0.25, 0.5, 0.9}) EXPECT_NEAR(second_eigenvalue(lazy_chain(a)), 1 - 2 * a, 1e-12);
  EXPECT_THROW(second_eigenvalue(Matrix{2, {0.5, 0.5, 0.4, 0.6}}), ValidationError);
  EXPECT_THROW(second_eigenvalue(Matrix{2, {0.6, 0.6, 0.4, 0.4}}), ValidationError);
}

TEST(Markov, ChainValidation) {
  EXPECT_THROW(TransitionChain({Matrix{2, {1, 0, 0, 1}}}, {0}), ValidationError);
  EXPECT_THROW(TransitionChain({lazy_chain(0.3)}, {1}), ValidationError);
  EXPECT_THROW(TransitionChain({lazy_chain(0.3), Matrix{3, std::vector<double>(9, 1.0 / 3)}}, {0, 1}),
               ValidationError);
}

TEST(Markov, ProductEigenvalueMatchesKronecker) {
  for (int t = 0; t < 40; ++t) {
    CounterRng rng(derive_seed(31, static_cast<std::uint64_t>(t)));
    const int y = 2 + static_cast<int>(rng.below(2));
    std::vector<Matrix> factors;
    for (int k = 0; k < 2; ++k) {
      // Average of a lazy identity and random symmetric permutation-like mixing.
      Matrix M{y, std::vector<double>(static_cast<std::size_t>(y * y), 0.0)};
      double mix = 0.05 + 0.9 * rng.uniform();
      for (int a = 0; a < y; ++a) {
        for (int b = 0; b < y; ++b) {
          double cyc = (b == (a + 1) % y || a == (b + 1) % y) ? (y == 2 ? 1.0 : 0.5) : 0.0;
          M.entries[static_cast<std::size_t>(a * y + b)] = (1 - mix) * cyc + mix / y;
        }
      }
      factors.push_back(M);
    }
    const int n = 1 + static_cast<int>(rng.below(y == 2 ? 5 : 3));
    std::vector<int> psi;
    for (int i = 0; i < n; ++i) psi.push_back(static_cast<int>(rng.below(2)));
    TransitionChain c(factors, psi);
    auto ev = eigenvalues(kronecker(c));
    EXPECT_NEAR(c.second_eigenvalue(), ev[1], 1e-9);
    EXPECT_LE(std::abs(ev[1]), c.factor_bound() + 1e-9);
  }
}

TEST(Markov, NegativeSpectrumSquares) {
  TransitionChain c({lazy_chain(0.9)}, {0, 0});
  EXPECT_NEAR(c.factor_bound(), 0.8, 1e-12);
  EXPECT_NEAR(c.second_eigenvalue(), 0.64, 1e-12);
}

TEST(Markov, AgreementExamples) {
  TransitionChain resample({Matrix{2, {0.5, 0.5, 0.5, 0.5}}}, {0});
  auto c = markov_agreement(resample, make::constant(1, 2, Codomain::Bit, 1));
  EXPECT_EQ(c.sigma, 1);
  EXPECT_EQ(c.disagreement, 0.0);
  EXPECT_EQ(c.mismatch, 0.0);
  EXPECT_TRUE(c.holds);

  auto d = markov_agreement(resample, make::dictator(1, 0));
  EXPECT_NEAR(d.disagreement, 0.5, 1e-15);
  EXPECT_NEAR(d.lambda, 0.0, 1e-12);
  EXPECT_NEAR(d.mismatch, 0.5, 1e-15);
  EXPECT_TRUE(d.holds);

  EXPECT_THROW(markov_agreement(resample, make::dictator(2, 0)), DomainError);
}

TEST(Markov, BoundHoldsOnRandomInstances) {
  for (int t = 0; t < 200; ++t) {
    CounterRng rng(derive_seed(32, static_cast<std::uint64_t>(t)));
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<Matrix> factors{lazy_chain(0.02 + 0.96 * rng.uniform()), lazy_chain(0.02 + 0.96 * rng.uniform())};
    std::vector<int> psi;
    for (int i = 0; i < n; ++i) psi.push_back(static_cast<int>(rng.below(2)));
    TransitionChain c(factors, psi);
    auto f = random_bits(n, rng, rng.uniform());
    auto r = markov_agreement(c, f);
    EXPECT_NEAR(r.disagreement, brute_disagreement(c, f), 1e-12);
    EXPECT_TRUE(r.holds) << "instance " << t;
  }
}

TEST(Markov, ChainAndFamilyFormats) {
  std::istringstream in("# lazy\nchain y=2 factors=1\nfactor 1\n0.7 0.3\n0.3 0.7\npsi 1 1 1\n");
  auto c = read_chain(in);
  EXPECT_EQ(c.n(), 3);
  EXPECT_NEAR(c.second_eigenvalue(), 0.4, 1e-12);
  std::istringstream missing("chain y=2 factors=2\nfactor 1\n0.7 0.3\n0.3 0.7\npsi 1\n");
  EXPECT_THROW(read_chain(missing), ParseError);
  std::istringstream fam("family n=4 k=2\n1,2\n1,3\n");
  auto F = read_family(fam);
  EXPECT_EQ(F.members, (std::vector<std::uint64_t>{0b0011, 0b0101}));
  std::istringstream bad("family n=4 k=2\n1,2,3\n");
  EXPECT_THROW(read_family(bad), ParseError);
}

TEST(FriedgutRegev, LiftExamples) {
  const int n = 6, k = 2;
  std::vector<std::uint64_t> all, star;
  for (std::uint64_t S = 0; S < (1U << n); ++S) {
    if (std::popcount(S) != k) continue;
    all.push_back(S);
    if (S & 1U) star.push_back(S);
  }
  auto f_all = friedgut_regev_lift(all, n, k);
  auto f_none = friedgut_regev_lift({}, n, k);
  auto f_star = friedgut_regev_lift(star, n, k);
  for (Index x = 0; x < f_all.size(); ++x) {
    const int w = std::popcount(x);
    EXPECT_EQ(f_all[x], w >= k ? 1.0 : 0.0);
    EXPECT_EQ(f_none[x], 0.0);
    double expect = (x & 1U) && w >= k ? static_cast<double>(k) / w : 0.0;
    EXPECT_NEAR(f_star[x], expect, 1e-15);
  }
  EXPECT_THROW(friedgut_regev_lift(std::vector<std::uint64_t>{0b111}, n, k), ValidationError);
}

TEST(FriedgutRegev, LiftMatchesSubsetAverage) {
  CounterRng rng(41);
  const int n = 7, k = 3;
  std::vector<std::uint64_t> fam;
  for (std::uint64_t S = 0; S < (1U << n); ++S) {
    if (std::popcount(S) == k && rng.bernoulli(0.4)) fam.push_back(S);
  }
  auto f = friedgut_regev_lift(fam, n, k);
  for (Index x = 0; x < f.size(); ++x) {
    int hits = 0, total = 0;
    for (std::uint64_t S = 0; S < (1U << n); ++S) {
      if (std::popcount(S) != k || (S & ~x) != 0) continue;
      ++total;
      hits += std::find(fam.begin(), fam.end(), S) != fam.end();
    }
    EXPECT_NEAR(f[x], total ? static_cast<double>(hits) / total : 0.0, 1e-12);
  }
}

TEST(Exactness, ReducesToRelevantCoordinates) {
  const auto P = builtin::nand(2);
  const int n = 12;
  std::vector<int> J{3, 7};
  std::vector<double> and_table{0, 0, 0, 1}, x3{0, 1, 0, 1};
  auto g_and = make::junta(n, J, and_table);
  auto g_x = make::junta(n, J, x3);
  EXPECT_EQ(relevant_coordinates(g_and), J);
  EXPECT_EQ(relevant_coordinates(g_x), std::vector<int>{3});

  std::vector<FunctionTable> good{g_and, g_x};
  auto small = verify_exactness(P, good, Index{1} << 10);
  EXPECT_EQ(small.coordinates, J);
  EXPECT_EQ(small.exact, is_generalized_polymorphism(P, good).holds);
  EXPECT_TRUE(small.exact);

  std::vector<FunctionTable> bad{g_and, make::dictator(n, 2)};
  auto r = verify_exactness(P, bad, Index{1} << 10);
  EXPECT_EQ(r.coordinates, (std::vector<int>{2, 3, 7}));
  EXPECT_FALSE(r.exact);
  ASSERT_TRUE(r.counterexample);
  EXPECT_TRUE(is_counterexample(P, bad, *r.counterexample));
  EXPECT_FALSE(is_generalized_polymorphism(P, bad).holds);
}

TEST(CorrectMonotone, Examples) {
  const auto P = builtin::nand(2);
  auto zeros = copies(make::constant(8, 2, Codomain::Bit, 0), 2);
  auto r0 = correct_monotone(P, zeros);
  EXPECT_TRUE(r0.accepted);
  EXPECT_EQ(r0.gs, zeros);
  EXPECT_EQ(r0.distances, (std::vector<double>{0.0, 0.0}));

  auto dict = copies(make::dictator(8, 2), 2);
  auto r1 = correct_monotone(P, dict);
  EXPECT_TRUE(r1.accepted);
  EXPECT_TRUE(r1.exact);
  EXPECT_EQ(r1.J, std::vector<int>{2});
  for (double d : r1.distances) EXPECT_LE(d, 0.1);

  EXPECT_THROW(correct_monotone(builtin::parity(3, 0), copies(make::dictator(4, 0), 3)), DomainError);
}

TEST(CorrectMonotone, PerturbedDictators) {
  const auto P = builtin::nand(2);
  for (int t = 0; t < 10; ++t) {
    auto inst = plant_and_perturb(P, copies(make::dictator(10, t % 10), 2), 0.01, derive_seed(51, static_cast<std::uint64_t>(t)),
                                  t % 2 == 0);
    auto r = correct_monotone(P, inst.fs);
    ASSERT_TRUE(r.accepted) << t;
    EXPECT_TRUE(is_generalized_polymorphism(P, r.gs).holds);
    for (int j = 0; j < 2; ++j) {
      EXPECT_TRUE(pointwise_le(r.gs[static_cast<std::size_t>(j)], inst.fs[static_cast<std::size_t>(j)]));
      EXPECT_LE(r.distances[static_cast<std::size_t>(j)], 0.1);
    }
    if (inst.fs[0] == inst.fs[1]) EXPECT_EQ(r.gs[0], r.gs[1]);
  }
}

TEST(CorrectMonotone, ConstantZeroCoordinateIsCopied) {
  // {000, 100, 010}: the third coordinate is always 0.
  const auto P = Predicate::uniform(3, 2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{0, 1, 0}});
  CounterRng rng(52);
  auto third = random_bits(6, rng);
  std::vector<FunctionTable> fs{make::dictator(6, 1), make::dictator(6, 1), third};
  // f_3 only ever sees the zero input.
  auto r = correct_monotone(P, fs);
  EXPECT_EQ(r.roles[2], OutputRole::Copied);
  EXPECT_EQ(r.gs[2], third);
  EXPECT_EQ(r.exact, is_generalized_polymorphism(P, r.gs).holds);
}

TEST(RoundGeneral, MatchesDirectRestrictedExpectation) {
  const auto P = builtin::nand_graph();
  const auto law = star_law(P);
  for (int t = 0; t < 10; ++t) {
    CounterRng rng(derive_seed(61, static_cast<std::uint64_t>(t)));
    const int n = 6;
    std::vector<int> J{1, 4};
    std::vector<FunctionTable> fs{random_bits(n, rng), random_bits(n, rng), random_bits(n, rng)};
    auto rho = sample_restriction(law, n - 2, rng.next());
    const double eta = 0.2;
    auto out = round_general_cells(P, law, fs, J, rho, eta);
    const auto free = complement(n, J);
    for (int j = 0; j < 3; ++j) {
      const auto& mu = P.marginal(j);
      for (Index c = 0; c < 4; ++c) {
        // Sum f_j over inputs agreeing with the cell on J and with rho elsewhere.
        double e = 0.0;
        for (Index x = 0; x < fs[0].size(); ++x) {
          double w = 1.0;
          if (((x >> J[0]) & 1U) != (c & 1U) || ((x >> J[1]) & 1U) != ((c >> 1) & 1U)) continue;
          for (std::size_t k = 0; k < free.size(); ++k) {
            const auto& pat = law.patterns()[static_cast<std::size_t>(rho[k])];
            int bit = static_cast<int>((x >> free[k]) & 1U);
            if (pat.star == j) {
              w *= mu[static_cast<std::size_t>(bit)];
            } else if (bit != pat.base[static_cast<std::size_t>(j)]) {
              w = 0.0;
            }
          }
          e += w * fs[static_cast<std::size_t>(j)][x];
        }
        auto dec = out.decisions[static_cast<std::size_t>(j)][c];
        if (e <= eta + 1e-12 && e >= eta - 1e-12) continue;
        CellDecision expect = e < eta ? CellDecision::Fixed0 : (e > 1 - eta ? CellDecision::Fixed1 : CellDecision::Kept);
        EXPECT_EQ(dec, expect) << "function " << j << " cell " << c << " e=" << e;
        if (j == 2) EXPECT_NE(dec, CellDecision::Kept);  // inflexible: no stars
      }
    }
  }
}

TEST(CorrectGeneral, PlantedParityCharacters) {
  const auto P = builtin::parity(3, 0);
  const std::uint64_t S = 0b1001010010;
  for (int t = 0; t < 5; ++t) {
    auto inst = plant_and_perturb(P, copies(Character{S, 0}.table(10), 3), 0.02, derive_seed(71, static_cast<std::uint64_t>(t)));
    CorrectionParams prm;
    prm.seed = static_cast<std::uint64_t>(t);
    auto r = correct_general(P, inst.fs, prm);
    ASSERT_TRUE(r.accepted) << t;
    EXPECT_TRUE(is_generalized_polymorphism(P, r.gs).holds);
    for (const auto& g : r.gs) EXPECT_TRUE(is_character(g, S));
    for (double d : r.distances) EXPECT_LE(d, 0.1);
  }
}

TEST(CorrectGeneral, ExactInputIsKept) {
  const auto P = builtin::nand(2);
  auto fs = copies(make::dictator(6, 3), 2);
  auto r = correct_general(P, fs);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.gs, fs);
}

TEST(CorrectGeneral, ConstantAndCopiedCoordinates) {
  // w_1 = 0 always, w_3 = w_2, w_4 = not w_2.
  const auto P = Predicate::uniform(4, 2, {Point{0, 0, 0, 1}, Point{0, 1, 1, 0}});
  CounterRng rng(72);
  auto f = flip_some(make::dictator(6, 2), 0.01, rng);
  // The fourth coordinate sees complemented inputs: f_4(y) = not f(not y).
  std::vector<double> neg(f.size());
  for (Index y = 0; y < f.size(); ++y) neg[y] = 1 - f[(f.size() - 1) ^ y];
  std::vector<FunctionTable> fs{make::constant(6, 2, Codomain::Bit, 0), f, f, f.with_values(neg)};
  auto r = correct_general(P, fs);
  EXPECT_EQ(r.roles[0], OutputRole::Constant);
  EXPECT_EQ(r.gs[0], make::constant(6, 2, Codomain::Bit, 0));
  EXPECT_EQ(r.roles[2], OutputRole::ClassCopy);
  EXPECT_EQ(r.roles[3], OutputRole::ClassCopy);
  EXPECT_EQ(r.gs[2], r.gs[1]);
  EXPECT_EQ(r.distances[3], r.distances[1]);
  EXPECT_TRUE(r.accepted);
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(is_generalized_polymorphism(P, r.gs).holds);
}

TEST(CorrectGeneral, PerturbedNandDictators) {
  const auto P = builtin::nand(2);
  for (int t = 0; t < 5; ++t) {
    auto inst = plant_and_perturb(P, copies(make::dictator(8, 1), 2), 0.01, derive_seed(73, static_cast<std::uint64_t>(t)));
    auto r = correct_general(P, inst.fs);
    EXPECT_EQ(r.exact, is_generalized_polymorphism(P, r.gs).holds);
    if (r.accepted) {
      for (double d : r.distances) EXPECT_LE(d, 0.1);
    }
  }
}

TEST(CorrectAlphabet, Examples) {
  const auto full = builtin::full(2, 3);
  CounterRng rng(81);
  std::vector<FunctionTable> fs;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> v(81);
    for (auto& x : v) x = static_cast<double>(rng.below(3));
    fs.emplace_back(4, 3, Codomain::Symbol, std::move(v));
  }
  auto r = correct_alphabet(full, fs);
  EXPECT_TRUE(r.exact);
  for (std::size_t j = 0; j < 2; ++j) {
    double changed = 0.0;
    for (Index x = 0; x < fs[j].size(); ++x) changed += fs[j][x] != r.gs[j][x];
    EXPECT_NEAR(r.distances[j], changed / 81.0, 1e-12);
  }

  auto dict = copies(make::dictator(4, 2, 3), 2);
  auto d = correct_alphabet(full, dict);
  EXPECT_TRUE(d.accepted);
  EXPECT_EQ(d.gs, dict);

  EXPECT_THROW(correct_alphabet(builtin::equality(2), copies(make::dictator(3, 0), 2)), DomainError);
}

TEST(CorrectAlphabet, RoundingMatchesDirectCellLaw) {
  std::vector<Point> nae;
  for (Index c = 0; c < 27; ++c) {
    auto w = decode(c, 3, 3);
    if (!(w[0] == w[1] && w[1] == w[2])) nae.push_back(w);
  }
  const auto P = Predicate::uniform(3, 3, nae);
  const auto law = star_law(P);
  const int n = 4;
  const std::vector<int> J{2};
  const auto free = complement(n, J);
  for (int t = 0; t < 10; ++t) {
    CounterRng rng(derive_seed(82, static_cast<std::uint64_t>(t)));
    std::vector<FunctionTable> fs;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> v(81);
      for (auto& x : v) x = static_cast<double>(rng.below(3));
      fs.emplace_back(n, 3, Codomain::Symbol, std::move(v));
    }
    auto rho = sample_restriction(law, n - 1, rng.next());
    const double eta = 0.3;
    auto out = round_alphabet_cells(P, law, fs, J, rho, eta);
    for (int j = 0; j < 3; ++j) {
      const auto& f = fs[static_cast<std::size_t>(j)];
      const auto& g = out.gs[static_cast<std::size_t>(j)];
      for (int c = 0; c < 3; ++c) {
        std::vector<double> pr(3, 0.0);
        std::vector<Index> cell;
        for (Index x = 0; x < f.size(); ++x) {
          auto pt = decode(x, n, 3);
          if (pt[2] != c) continue;
          cell.push_back(x);
          double w = 1.0;
          for (std::size_t k = 0; k < free.size(); ++k) {
            const auto& pat = law.patterns()[static_cast<std::size_t>(rho[k])];
            int a = pt[static_cast<std::size_t>(free[k])];
            if (pat.star == j) {
              w *= P.marginal(j)[static_cast<std::size_t>(a)];
            } else if (a != pat.base[static_cast<std::size_t>(j)]) {
              w = 0.0;
            }
          }
          pr[static_cast<std::size_t>(f.symbol(x))] += w;
        }
        const int top = static_cast<int>(std::max_element(pr.begin(), pr.end()) - pr.begin());
        for (Index x : cell) {
          const int a = f.symbol(x);
          EXPECT_EQ(g.symbol(x), pr[static_cast<std::size_t>(a)] >= eta ? a : top);
        }
      }
    }
  }
}

TEST(CorrectFractional, Examples) {
  const int n = 8;
  auto zero = make::constant(n, 2, Codomain::Real, 0);
  auto r0 = correct_fractional_nand(zero, zero, 0.2);
  EXPECT_TRUE(r0.accepted);
  EXPECT_EQ(r0.gs[0], make::constant(n, 2, Codomain::Bit, 0));

  std::vector<std::uint64_t> star;
  for (std::uint64_t S = 0; S < (1U << n); ++S) {
    if (std::popcount(S) == 2 && (S & 1U)) star.push_back(S);
  }
  auto lift = friedgut_regev_lift(star, n, 2);
  auto r = correct_fractional_nand(lift, lift, 0.2);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.gs[0], r.gs[1]);
  const Predicate nand = Predicate(2, 2, {Point{0, 0}, Point{1, 0}, Point{0, 1}}, std::vector<double>{0.6, 0.2, 0.2});
  EXPECT_TRUE(is_generalized_polymorphism(nand, r.gs).holds);

  auto one = make::constant(n, 2, Codomain::Real, 1);
  auto r1 = correct_fractional_nand(one, one, 0.1);
  EXPECT_EQ(r1.exact, is_generalized_polymorphism(builtin::nand(2), r1.gs).holds);
  if (r1.accepted) EXPECT_TRUE(r1.exact);
}

TEST(CorrectionResult, WritesStructuredText) {
  const auto P = builtin::nand(2);
  auto r = correct_monotone(P, copies(make::dictator(5, 0), 2));
  std::ostringstream out;
  r.write(out);
  auto s = out.str();
  EXPECT_NE(s.find("correction pipeline=monotone status=accepted exact=1"), std::string::npos);
  EXPECT_NE(s.find("J=1\n"), std::string::npos);
  EXPECT_NE(s.find("function 2 role=cells"), std::string::npos);
}
