#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "genpoly/errors.hpp"
#include "genpoly/funcspace.hpp"
#include "genpoly/rng.hpp"

using namespace genpoly;

namespace {

FunctionTable random_bits(int n, CounterRng& rng) {
  std::vector<double> v(Index{1} << n);
  for (auto& x : v) x = static_cast<double>(rng.below(2));
  return FunctionTable(n, 2, Codomain::Bit, std::move(v));
}

FunctionTable random_table(int n, int s, CounterRng& rng) {
  std::vector<double> v(checked_power(s, n, kMaxTableSize));
  for (auto& x : v) x = static_cast<double>(rng.below(static_cast<std::uint64_t>(s)));
  return FunctionTable(n, s, Codomain::Symbol, std::move(v));
}

}  // namespace

TEST(Eval, ConstantDictatorCharacter) {
  auto one = make::constant(3, 2, Codomain::Bit, 1.0);
  EXPECT_EQ(one.eval(Point{0, 1, 0}), 1.0);
  auto d = make::dictator(3, 0);
  EXPECT_EQ(d.eval(Point{1, 0, 0}), 1.0);
  EXPECT_EQ(d.eval(Point{0, 1, 1}), 0.0);
  auto chi = make::character(3, std::vector<int>{0, 1}, 1);
  EXPECT_EQ(chi.eval(Point{1, 1, 0}), 1.0);
  EXPECT_EQ((Character{0b011, 1}.eval(Point{1, 1, 0})), 1);
}

TEST(Eval, RejectsOutOfAlphabet) {
  auto f = make::constant(2, 2, Codomain::Bit, 0.0);
  EXPECT_THROW(f.eval(Point{0, 2}), DomainError);
  EXPECT_THROW(f.eval(Point{0}), DomainError);
}

TEST(Encoding, CoordinateZeroLeastSignificant) {
  EXPECT_EQ(encode(Point{1, 0, 0}, 2), 1u);
  EXPECT_EQ(encode(Point{0, 0, 1}, 2), 4u);
  EXPECT_EQ(encode(Point{2, 1}, 3), 5u);
  EXPECT_EQ(decode(5, 2, 3), (Point{2, 1}));
}

TEST(FunctionTable, ValidatesCodomain) {
  EXPECT_THROW(FunctionTable(1, 2, Codomain::Bit, {0.0, 2.0}), ValidationError);
  EXPECT_THROW(FunctionTable(1, 3, Codomain::Symbol, {0.0, 1.0, 3.0}), ValidationError);
  EXPECT_THROW(FunctionTable(1, 2, Codomain::Real, {0.0, 1.5}), ValidationError);
  EXPECT_THROW(FunctionTable(2, 2, Codomain::Bit, {0.0, 1.0}), ValidationError);
  EXPECT_NO_THROW(FunctionTable(1, 2, Codomain::Real, {0.25, 1.0}));
}

TEST(Restrict, Substitution) {
  auto x = make::character(2, std::vector<int>{0, 1}, 0);
  auto r = restrict(x, PartialAssignment({1, PartialAssignment::kStar}));
  ASSERT_EQ(r.n(), 1);
  EXPECT_EQ(r[0], 1.0);
  EXPECT_EQ(r[1], 0.0);

  CounterRng rng(7);
  auto f = random_bits(5, rng);
  EXPECT_EQ(restrict(f, PartialAssignment::all_free(5)), f);

  auto a = make::and_all(2);
  auto z = restrict(a, PartialAssignment({0, PartialAssignment::kStar}));
  EXPECT_EQ(z, make::constant(1, 2, Codomain::Bit, 0.0));
}

TEST(Restrict, MatchesPointwiseDefinition) {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int s = 2 + static_cast<int>(rng.below(2));
    int n = 4;
    auto f = random_table(n, s, rng);
    std::vector<int> e(n);
    for (auto& v : e) {
      int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(s + 1)));
      v = r == s ? PartialAssignment::kStar : r;
    }
    PartialAssignment a(e);
    auto g = restrict(f, a);
    for (Index y = 0; y < g.size(); ++y) {
      auto yp = decode(y, g.n(), s);
      Point x(n);
      for (int i = 0, k = 0; i < n; ++i) x[i] = a.is_free(i) ? yp[k++] : static_cast<Symbol>(a[i]);
      EXPECT_EQ(g[y], f.eval(x));
    }
  }
}

TEST(Restrict, CompositionLaw) {
  CounterRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6;
    auto f = random_table(n, 3, rng);
    std::vector<int> outer(n);
    for (auto& v : outer) {
      int r = static_cast<int>(rng.below(4));
      v = r == 3 ? PartialAssignment::kStar : r;
    }
    PartialAssignment a(outer);
    std::vector<int> inner(a.free_set().size());
    for (auto& v : inner) {
      int r = static_cast<int>(rng.below(4));
      v = r == 3 ? PartialAssignment::kStar : r;
    }
    PartialAssignment b(inner);
    EXPECT_EQ(restrict(restrict(f, a), b), restrict(f, a.compose(b)));
  }
}

TEST(MakeFunction, HybridAndJunta) {
  auto h = make::hybrid(5);
  EXPECT_EQ(h.eval(Point{1, 1, 0, 0, 0}), 1.0);
  EXPECT_EQ(h.eval(Point{1, 0, 1, 1, 1}), 1.0);  // weight 4 > 3: OR
  EXPECT_EQ(h.eval(Point{1, 0, 1, 0, 0}), 0.0);  // weight 2: AND
  EXPECT_EQ(make::hybrid_value(Point{1, 0, 1, 1, 1}), 1);

  EXPECT_EQ(make::character(4, std::vector<int>{}, 0), make::constant(4, 2, Codomain::Bit, 0.0));
  std::vector<int> J{1};
  std::vector<double> t{0, 1};
  EXPECT_EQ(make::junta(3, J, t), make::dictator(3, 1));
  std::vector<double> bad{0, 1, 0};
  EXPECT_THROW(make::junta(3, J, bad), ValidationError);
}

TEST(MakeFunction, ParsesConstructors) {
  EXPECT_EQ(make_function(3, 2, Codomain::Bit, "char S=1,2 b=1"),
            make::character(3, std::vector<int>{0, 1}, 1));
  EXPECT_EQ(make_function(3, 2, Codomain::Bit, "dictator i=3"), make::dictator(3, 2));
  EXPECT_EQ(make_function(4, 2, Codomain::Bit, "hybrid"), make::hybrid(4));
  EXPECT_EQ(make_function(4, 2, Codomain::Bit, "and"), make::and_all(4));
  EXPECT_EQ(make_function(4, 2, Codomain::Bit, "or"), make::or_all(4));
  EXPECT_EQ(make_function(2, 2, Codomain::Real, "const 0.5"), make::constant(2, 2, Codomain::Real, 0.5));
  EXPECT_EQ(make_function(2, 3, Codomain::Symbol, "dictator i=2"), make::dictator(2, 1, 3));
  EXPECT_THROW(make_function(2, 2, Codomain::Bit, "bogus"), ParseError);
}

TEST(Distance, Examples) {
  auto nu = ProductMeasure::biased(3, 0.3);
  CounterRng rng(5);
  auto f = random_bits(3, rng);
  EXPECT_EQ(distance(f, f, nu), 0.0);
  auto c0 = make::character(3, std::vector<int>{0, 2}, 0);
  auto c1 = make::character(3, std::vector<int>{0, 2}, 1);
  EXPECT_NEAR(distance(c0, c1, nu), 1.0, 1e-15);
  EXPECT_NEAR(distance(make::dictator(3, 0), make::constant(3, 2, Codomain::Bit, 0), nu), 0.3, 1e-15);
}

TEST(Distance, PseudometricAndSquaredDifference) {
  CounterRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(5);
    for (auto& v : p) v = 0.05 + 0.9 * rng.uniform();
    auto nu = ProductMeasure::biased(p);
    auto f = random_bits(5, rng);
    auto g = random_bits(5, rng);
    auto h = random_bits(5, rng);
    EXPECT_DOUBLE_EQ(distance(f, g, nu), distance(g, f, nu));
    EXPECT_LE(distance(f, h, nu), distance(f, g, nu) + distance(g, h, nu) + 1e-15);
    auto w = nu.table();
    double sq = 0.0;
    for (Index x = 0; x < w.size(); ++x) sq += w[x] * (f[x] - g[x]) * (f[x] - g[x]);
    EXPECT_NEAR(distance(f, g, nu), sq, 1e-15);
  }
}

TEST(Measure, Validation) {
  EXPECT_THROW(Measure({0.5, 0.49}), ValidationError);
  EXPECT_THROW(Measure({1.0, 0.0}), ValidationError);
  EXPECT_THROW(Measure::bernoulli(0.0), ValidationError);
  EXPECT_NO_THROW(Measure({0.25, 0.75}));
}

TEST(Cells, Examples) {
  auto f = make::character(2, std::vector<int>{0, 1}, 0);
  std::vector<int> none;
  auto cells0 = enumerate_cells(f, none, ProductMeasure::uniform(0, 2));
  ASSERT_EQ(cells0.size(), 1u);
  EXPECT_EQ(cells0[0].weight, 1.0);
  EXPECT_EQ(cells0[0].subfunction, f);

  std::vector<int> J1{0};
  auto cells1 = enumerate_cells(f, J1, ProductMeasure::uniform(1, 2));
  ASSERT_EQ(cells1.size(), 2u);
  EXPECT_EQ(cells1[0].weight, 0.5);
  EXPECT_EQ(cells1[0].subfunction, make::dictator(1, 0));
  EXPECT_EQ(cells1[1].subfunction, make::character(1, std::vector<int>{0}, 1));

  std::vector<int> J2{0, 1};
  auto cells2 = enumerate_cells(f, J2, ProductMeasure::biased(2, 0.25));
  ASSERT_EQ(cells2.size(), 4u);
  EXPECT_DOUBLE_EQ(cells2[0].weight, 9.0 / 16);
  EXPECT_DOUBLE_EQ(cells2[1].weight, 3.0 / 16);
  EXPECT_DOUBLE_EQ(cells2[2].weight, 3.0 / 16);
  EXPECT_DOUBLE_EQ(cells2[3].weight, 1.0 / 16);
}

TEST(Cells, WeightsSumToOneAndReassemble) {
  CounterRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_table(5, 3, rng);
    std::vector<int> J;
    for (int i = 0; i < 5; ++i) {
      if (rng.below(2)) J.push_back(i);
    }
    std::vector<Measure> ms;
    for (std::size_t k = 0; k < J.size(); ++k) {
      double a = 0.1 + rng.uniform(), b = 0.1 + rng.uniform(), c = 0.1 + rng.uniform();
      double t = a + b + c;
      ms.emplace_back(std::vector<double>{a / t, b / t, 1.0 - a / t - b / t});
    }
    ProductMeasure nu(ms, 3);
    auto cells = enumerate_cells(f, J, nu);
    double total = 0.0;
    std::vector<FunctionTable> subs;
    for (const auto& c : cells) {
      total += c.weight;
      subs.push_back(c.subfunction);
      EXPECT_EQ(c.subfunction, restrict(f, PartialAssignment::fixing(5, J, c.assignment)));
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(assemble_cells(5, J, subs), f);
  }
}

TEST(Cells, CapExceeded) {
  auto f = make::constant(6, 2, Codomain::Bit, 0);
  std::vector<int> J{0, 1, 2, 3, 4, 5};
  EXPECT_THROW(enumerate_cells(f, J, ProductMeasure::uniform(6, 2), 16), ResourceError);
}

TEST(Storage, PackedBitsRoundTrip) {
  CounterRng rng(1);
  auto f = random_bits(10, rng);
  auto words = pack_bits(f);
  EXPECT_EQ(words.size(), 16u);
  EXPECT_EQ(unpack_bits(10, words), f);
}

TEST(FileFormat, RoundTripAndConstructors) {
  CounterRng rng(2);
  auto f = random_table(3, 3, rng);
  std::stringstream ss;
  write_function(ss, f);
  EXPECT_EQ(read_function(ss), f);

  auto r = FunctionTable(2, 2, Codomain::Real, {0.1, 0.25, 1.0 / 3, 1.0});
  std::stringstream rs;
  write_function(rs, r);
  EXPECT_EQ(read_function(rs), r);

  std::stringstream cs("fn n=3 sigma=2 codomain=bit\nchar S=1,3 b=0\n");
  EXPECT_EQ(read_function(cs), make::character(3, std::vector<int>{0, 2}, 0));
  std::stringstream bad("fn n=2 sigma=2 codomain=bit\ntable 0 1 1\n");
  EXPECT_THROW(read_function(bad), ValidationError);
}

TEST(Support, OrderAndFormat) {
  EXPECT_EQ(format_support(0b1101), "1,3,4");
  EXPECT_TRUE(support_less(0b001, 0b111));   // {1} < {1,2,3}
  EXPECT_TRUE(support_less(0b011, 0b101));   // {1,2} < {1,3}
  EXPECT_FALSE(support_less(0b100, 0b011));  // {3} > {1,2}
  EXPECT_TRUE(support_less(0, 0b1));
}
