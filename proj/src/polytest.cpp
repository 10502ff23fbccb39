#include "genpoly/polytest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genpoly/errors.hpp"
#include "genpoly/rng.hpp"
#include "numeric.hpp"

namespace genpoly {

namespace {

constexpr Index kSaturated = std::numeric_limits<Index>::max();

Index saturating_power(Index base, int n) {
  Index r = 1;
  for (int i = 0; i < n; ++i) {
    if (base != 0 && r > kSaturated / base) return kSaturated;
    r *= base;
  }
  return r;
}

int common_arity(const Predicate& P, std::span<const FunctionTable> fs, bool discrete) {
  if (static_cast<int>(fs.size()) != P.arity()) {
    throw DomainError("expected " + std::to_string(P.arity()) + " functions, got " + std::to_string(fs.size()));
  }
  const int n = fs[0].n();
  for (const auto& f : fs) {
    if (f.n() != n) throw DomainError("all functions must have the same number of coordinates");
    if (f.alphabet_size() != P.alphabet_size()) throw DomainError("function domain alphabet differs from the predicate's");
    if (discrete && (!f.is_discrete() || f.output_size() != P.alphabet_size())) {
      throw DomainError("functions must output symbols of the predicate's alphabet");
    }
    if (!discrete && f.codomain() == Codomain::Symbol) throw DomainError("joint expectation needs numeric functions");
  }
  return n;
}

std::vector<Point> unpack_inputs(std::span<const Index> idx, int n, int s) {
  std::vector<Point> xs;
  for (Index x : idx) xs.push_back(decode(x, n, s));
  return xs;
}

struct OdometerResult {
  std::vector<double> distribution;
  std::optional<std::vector<Point>> counterexample;
};

/// Walks P^n in odometer order with incremental input indices and weights.
/// The lowest u coordinates form an inner block of K^u member combinations
/// with precomputed offsets; their weights are summed plainly per output code
/// and folded into the compensated totals once per setting of the rest.
OdometerResult odometer(const Predicate& P, std::span<const FunctionTable> fs, int n, bool stop_at_violation) {
  constexpr Index kBlock = 1024;
  const int m = P.arity();
  const int s = P.alphabet_size();
  const int K = P.size();
  const auto M = static_cast<std::size_t>(m);
  std::vector<Index> spow(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) spow[static_cast<std::size_t>(i)] = spow[static_cast<std::size_t>(i) - 1] * static_cast<Index>(s);

  int u = 0;
  Index B = 1;
  while (u < n && B * static_cast<Index>(K) <= kBlock) {
    B *= static_cast<Index>(K);
    ++u;
  }
  // off[b * m + j] = input offset of function j for inner combination b
  std::vector<Index> off(B * M, 0);
  std::vector<double> wt(B, 1.0);
  for (Index b = 0; b < B; ++b) {
    Index rest = b;
    for (int i = 0; i < u; ++i, rest /= static_cast<Index>(K)) {
      const int k = static_cast<int>(rest % static_cast<Index>(K));
      wt[b] *= P.weight(k);
      for (std::size_t j = 0; j < M; ++j) off[b * M + j] += P.member(k)[j] * spow[static_cast<std::size_t>(i)];
    }
  }
  // step[d * m + j] = change of member entry j when a digit moves from d to d + 1 (mod K)
  std::vector<std::ptrdiff_t> step(static_cast<std::size_t>(K) * M);
  for (int k = 0; k < K; ++k) {
    const Point& now = P.member(k);
    const Point& next = P.member(k + 1 < K ? k + 1 : 0);
    for (std::size_t j = 0; j < M; ++j) {
      step[static_cast<std::size_t>(k) * M + j] = static_cast<std::ptrdiff_t>(next[j]) - static_cast<std::ptrdiff_t>(now[j]);
    }
  }
  const int outer = n - u;
  std::vector<int> digit(static_cast<std::size_t>(outer), 0);
  // base[j] = input index of function j from the outer coordinates
  std::vector<Index> base(M, 0);
  for (int i = u; i < n; ++i)
    for (std::size_t j = 0; j < M; ++j) base[j] += P.member(0)[j] * spow[static_cast<std::size_t>(i)];
  // prod[i] = product of digit weights at outer positions >= i
  std::vector<double> prod(static_cast<std::size_t>(outer) + 1, 1.0);
  for (int i = outer - 1; i >= 0; --i) prod[static_cast<std::size_t>(i)] = prod[static_cast<std::size_t>(i) + 1] * P.weight(0);

  const Index codes = checked_power(s, m, kMaxTableSize);
  std::vector<CompensatedSum> acc(codes);
  std::vector<double> local(codes, 0.0);
  std::vector<Index> touched;
  std::vector<std::vector<Symbol>> tables;
  for (const auto& f : fs) {
    auto& t = tables.emplace_back(f.size());
    for (Index x = 0; x < f.size(); ++x) t[x] = static_cast<Symbol>(f.symbol(x));
  }
  auto output_code = [&](Index b) {
    Index code = 0;
    for (int j = m - 1; j >= 0; --j) {
      const auto J = static_cast<std::size_t>(j);
      code = code * static_cast<Index>(s) + tables[J][base[J] + off[b * M + J]];
    }
    return code;
  };
  const bool dense = codes <= B;
  OdometerResult out;
  while (true) {
    bool violated = false;
    if (dense) {
      for (Index b = 0; b < B; ++b) local[output_code(b)] += wt[b];
      for (Index c = 0; c < codes; ++c) {
        if (local[c] == 0.0) continue;
        touched.push_back(c);
        violated = violated || !P.contains_code(c);
      }
    } else {
      for (Index b = 0; b < B; ++b) {
        const Index code = output_code(b);
        if (local[code] == 0.0) {
          touched.push_back(code);
          violated = violated || !P.contains_code(code);
        }
        local[code] += wt[b];
      }
    }
    bool stop = false;
    if (violated && !out.counterexample) {
      Index b = 0;
      while (P.contains_code(output_code(b))) ++b;
      std::vector<Index> idx(base);
      for (std::size_t j = 0; j < M; ++j) idx[j] += off[b * M + j];
      out.counterexample = unpack_inputs(idx, n, s);
      stop = stop_at_violation;
    }
    for (Index c : touched) {
      acc[c].add(prod[0] * local[c]);
      local[c] = 0.0;
    }
    touched.clear();
    if (stop) break;
    int i = 0;
    for (; i < outer; ++i) {
      auto& d = digit[static_cast<std::size_t>(i)];
      const auto p = static_cast<std::ptrdiff_t>(spow[static_cast<std::size_t>(i + u)]);
      for (std::size_t j = 0; j < M; ++j) {
        base[j] = static_cast<Index>(static_cast<std::ptrdiff_t>(base[j]) + step[static_cast<std::size_t>(d) * M + j] * p);
      }
      d = d + 1 < K ? d + 1 : 0;
      if (d != 0) break;
    }
    if (i == outer) break;
    for (int t = i; t >= 0; --t) {
      prod[static_cast<std::size_t>(t)] = prod[static_cast<std::size_t>(t) + 1] * P.weight(digit[static_cast<std::size_t>(t)]);
    }
  }
  out.distribution.resize(codes);
  for (Index c = 0; c < codes; ++c) out.distribution[c] = acc[c].value();
  return out;
}

/// Column-prefix transfer matrix A[b][a] = mu(prefix b, last symbol a).
std::vector<double> transfer_matrix(const Predicate& P) {
  const int s = P.alphabet_size();
  const Index R = checked_power(s, P.arity() - 1, kMaxTableSize);
  std::vector<double> A(R * static_cast<Index>(s), 0.0);
  for (int k = 0; k < P.size(); ++k) {
    Index code = encode(P.member(k), s);
    Index b = code % R;
    Index a = code / R;
    A[b * static_cast<Index>(s) + a] = P.weight(k);
  }
  return A;
}

/// V[y] = sum over x^m of prod_i A[y_i][x^m_i] * h(x^m), y in (Sigma^(m-1))^n.
std::vector<double> contract_last(const Predicate& P, std::span<const double> h, int n) {
  const int s = P.alphabet_size();
  const Index S = static_cast<Index>(s);
  const Index R = checked_power(s, P.arity() - 1, kMaxTableSize);
  auto A = transfer_matrix(P);
  std::vector<double> cur(h.begin(), h.end());
  Index low = 1;
  for (int i = 0; i < n; ++i) {
    Index high = cur.size() / (low * S);
    std::vector<double> next(low * R * high, 0.0);
    for (Index hi = 0; hi < high; ++hi) {
      for (Index b = 0; b < R; ++b) {
        double* dst = next.data() + low * (b + R * hi);
        for (Index a = 0; a < S; ++a) {
          double w = A[b * S + a];
          if (w == 0.0) continue;
          const double* src = cur.data() + low * (a + S * hi);
          for (Index l = 0; l < low; ++l) dst[l] += w * src[l];
        }
      }
    }
    cur = std::move(next);
    low *= R;
  }
  return cur;
}

/// Walks the row-prefix indices y = 0, 1, ... in order and keeps the input
/// indices x^1..x^(m-1) they encode up to date, one carry at a time.
class PrefixOdometer {
 public:
  PrefixOdometer(int n, int m, int s, Index R)
      : digits_(static_cast<std::size_t>(n), 0), idx_(static_cast<std::size_t>(m), 0), m_(m), R_(R) {
    Index p = 1;
    for (int i = 0; i < n; ++i, p *= static_cast<Index>(s)) spow_.push_back(p);
    sym_.resize(R * static_cast<Index>(m));
    for (Index b = 0; b < R; ++b) {
      Index v = b;
      for (int j = 0; j + 1 < m; ++j, v /= static_cast<Index>(s)) sym_[b * static_cast<Index>(m) + static_cast<Index>(j)] = v % static_cast<Index>(s);
    }
  }

  const std::vector<Index>& inputs() const { return idx_; }
  std::vector<Index>& inputs() { return idx_; }

  void advance() {
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      const Index old = digits_[i];
      const Index next = old + 1 == R_ ? 0 : old + 1;
      for (int j = 0; j + 1 < m_; ++j) {
        idx_[static_cast<std::size_t>(j)] += (sym_[next * static_cast<Index>(m_) + static_cast<Index>(j)] -
                                              sym_[old * static_cast<Index>(m_) + static_cast<Index>(j)]) *
                                             spow_[i];
      }
      digits_[i] = next;
      if (next != 0) return;
    }
  }

 private:
  std::vector<Index> digits_;
  std::vector<Index> idx_;
  std::vector<Index> spow_;
  std::vector<Index> sym_;
  int m_;
  Index R_;
};

std::vector<double> contraction_distribution(const Predicate& P, std::span<const FunctionTable> fs, int n,
                                             std::vector<std::vector<double>>* keep = nullptr) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  const Index R = checked_power(s, m - 1, kMaxTableSize);
  Index codes = checked_power(s, m, kMaxTableSize);
  std::vector<CompensatedSum> acc(codes);
  const auto& last = fs[static_cast<std::size_t>(m) - 1];
  for (int am = 0; am < s; ++am) {
    std::vector<double> h(last.size());
    for (Index x = 0; x < h.size(); ++x) h[x] = last.symbol(x) == am ? 1.0 : 0.0;
    auto V = contract_last(P, h, n);
    PrefixOdometer od(n, m, s, R);
    const auto& idx = od.inputs();
    for (Index y = 0; y < V.size(); ++y, od.advance()) {
      if (V[y] == 0.0) continue;
      Index code = static_cast<Index>(am);
      for (int j = m - 2; j >= 0; --j) {
        code = code * static_cast<Index>(s) + static_cast<Index>(fs[static_cast<std::size_t>(j)].symbol(idx[static_cast<std::size_t>(j)]));
      }
      acc[code].add(V[y]);
    }
    if (keep) keep->push_back(std::move(V));
  }
  std::vector<double> out(codes);
  for (Index c = 0; c < codes; ++c) out[c] = acc[c].value();
  return out;
}

/// Recovers explicit inputs realizing output code `target` from the kept
/// contraction tables.
std::vector<Point> contraction_witness(const Predicate& P, std::span<const FunctionTable> fs, int n, Index target,
                                       const std::vector<std::vector<double>>& kept) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  const Index S = static_cast<Index>(s);
  const Index R = checked_power(s, m - 1, kMaxTableSize);
  const auto alpha = decode(target, m, s);
  const auto& V = kept[alpha[static_cast<std::size_t>(m) - 1]];
  auto A = transfer_matrix(P);
  PrefixOdometer od(n, m, s, R);
  auto& idx = od.inputs();
  for (Index y = 0; y < V.size(); ++y, od.advance()) {
    if (V[y] == 0.0) continue;
    bool match = true;
    for (int j = 0; j + 1 < m && match; ++j) {
      match = fs[static_cast<std::size_t>(j)].symbol(idx[static_cast<std::size_t>(j)]) == alpha[static_cast<std::size_t>(j)];
    }
    if (!match) continue;
    const auto& last = fs[static_cast<std::size_t>(m) - 1];
    for (Index x = 0; x < last.size(); ++x) {
      if (last.symbol(x) != alpha[static_cast<std::size_t>(m) - 1]) continue;
      Index yy = y, xx = x;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        ok = A[(yy % R) * S + xx % S] > 0.0;
        yy /= R;
        xx /= S;
      }
      if (ok) {
        idx[static_cast<std::size_t>(m) - 1] = x;
        return unpack_inputs(idx, n, s);
      }
    }
  }
  throw Error("internal: no witness for a positive output probability");
}

Engine choose_engine(const Predicate& P, int n, Engine engine, Index cap) {
  Index odo = odometer_cost(P, n);
  Index con = contraction_cost(P, n);
  if (engine == Engine::Auto) engine = odo <= con ? Engine::Odometer : Engine::Contraction;
  Index cost = engine == Engine::Odometer ? odo : con;
  if (cost > cap) {
    throw ResourceError("exhaustive enumeration needs about " + (cost == kSaturated ? std::string("2^64+") : std::to_string(cost)) +
                        " steps, above the cap of " + std::to_string(cap) + "; use the Monte Carlo estimator");
  }
  return engine;
}

std::vector<double> marginal_product_weights(std::span<const double> marginal, int k, int s) {
  Index size = checked_power(s, k, kMaxTableSize);
  std::vector<double> w(size, 1.0);
  for (Index x = 0; x < size; ++x) {
    Index y = x;
    for (int i = 0; i < k; ++i) {
      w[x] *= marginal[y % static_cast<Index>(s)];
      y /= static_cast<Index>(s);
    }
  }
  return w;
}

}  // namespace

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double N = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / N;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / N;
  const double center = (p + z2 / (2 * N)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N));
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

Index odometer_cost(const Predicate& P, int n) { return saturating_power(static_cast<Index>(P.size()), n); }

Index contraction_cost(const Predicate& P, int n) {
  Index R = saturating_power(static_cast<Index>(P.alphabet_size()), P.arity() - 1);
  Index rows = saturating_power(R, n);
  Index s = static_cast<Index>(P.alphabet_size());
  return rows > kSaturated / s ? kSaturated : rows * s;
}

std::vector<double> output_distribution(const Predicate& P, std::span<const FunctionTable> fs, Engine engine,
                                        Index cap) {
  const int n = common_arity(P, fs, true);
  if (choose_engine(P, n, engine, cap) == Engine::Odometer) return odometer(P, fs, n, false).distribution;
  return contraction_distribution(P, fs, n);
}

ViolationReport violation_exact(const Predicate& P, std::span<const FunctionTable> fs, Engine engine, Index cap) {
  const int n = common_arity(P, fs, true);
  ViolationReport r;
  r.method = ViolationMethod::Exhaustive;
  std::vector<double> dist;
  std::vector<std::vector<double>> kept;
  const bool odo = choose_engine(P, n, engine, cap) == Engine::Odometer;
  if (odo) {
    auto res = odometer(P, fs, n, false);
    dist = std::move(res.distribution);
    r.counterexample = std::move(res.counterexample);
  } else {
    dist = contraction_distribution(P, fs, n, &kept);
  }
  CompensatedSum bad;
  std::optional<Index> first_bad;
  for (Index c = 0; c < dist.size(); ++c) {
    if (!P.contains_code(c) && dist[c] > 0.0) {
      bad.add(dist[c]);
      if (!first_bad) first_bad = c;
    }
  }
  r.probability = std::clamp(bad.value(), 0.0, 1.0);
  if (!odo && first_bad) r.counterexample = contraction_witness(P, fs, n, *first_bad, kept);
  return r;
}

ViolationReport violation_mc(const Predicate& P, std::span<const Evaluator> fs, int n, std::uint64_t samples,
                             std::uint64_t seed) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  if (static_cast<int>(fs.size()) != m) throw DomainError("one evaluator per predicate coordinate is required");
  if (samples == 0) throw DomainError("at least one sample is required");
  DiscreteSampler column(P.weights());
  std::vector<Point> xs(static_cast<std::size_t>(m), Point(static_cast<std::size_t>(n)));
  Point out(static_cast<std::size_t>(m));
  ViolationReport r;
  r.method = ViolationMethod::MonteCarlo;
  r.samples = samples;
  std::uint64_t bad = 0;
  for (std::uint64_t t = 0; t < samples; ++t) {
    CounterRng rng(derive_seed(seed, t));
    for (int i = 0; i < n; ++i) {
      const Point& w = P.member(static_cast<int>(column(rng)));
      for (int j = 0; j < m; ++j) xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < m; ++j) {
      int v = fs[static_cast<std::size_t>(j)](xs[static_cast<std::size_t>(j)]);
      if (v < 0 || v >= s) throw DomainError("evaluator output outside the alphabet");
      out[static_cast<std::size_t>(j)] = static_cast<Symbol>(v);
    }
    if (!P.contains(out)) {
      ++bad;
      if (!r.counterexample) r.counterexample = xs;
    }
  }
  r.probability = static_cast<double>(bad) / static_cast<double>(samples);
  r.interval = wilson_interval(bad, samples);
  return r;
}

ViolationReport violation_mc(const Predicate& P, std::span<const FunctionTable> fs, std::uint64_t samples,
                             std::uint64_t seed) {
  const int n = common_arity(P, fs, true);
  std::vector<Evaluator> evals;
  for (const auto& f : fs) evals.emplace_back([&f](std::span<const Symbol> x) { return f.symbol(f.encode(x)); });
  return violation_mc(P, evals, n, samples, seed);
}

PolymorphismCheck is_generalized_polymorphism(const Predicate& P, std::span<const FunctionTable> fs, Index cap) {
  const int n = common_arity(P, fs, true);
  PolymorphismCheck r;
  if (choose_engine(P, n, Engine::Auto, cap) == Engine::Odometer) {
    r.counterexample = odometer(P, fs, n, true).counterexample;
  } else {
    auto v = violation_exact(P, fs, Engine::Contraction, cap);
    r.counterexample = std::move(v.counterexample);
  }
  r.holds = !r.counterexample.has_value();
  return r;
}

bool is_counterexample(const Predicate& P, std::span<const FunctionTable> fs, std::span<const Point> xs) {
  const int n = common_arity(P, fs, true);
  const int m = P.arity();
  if (static_cast<int>(xs.size()) != m) return false;
  Point col(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) col[static_cast<std::size_t>(j)] = xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (!P.contains(col)) return false;
  }
  for (int j = 0; j < m; ++j) col[static_cast<std::size_t>(j)] = static_cast<Symbol>(fs[static_cast<std::size_t>(j)].symbol(fs[static_cast<std::size_t>(j)].encode(xs[static_cast<std::size_t>(j)])));
  return !P.contains(col);
}

std::vector<int> chi_coloring(std::span<const double> expectations, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("coloring threshold must lie in (0, 1/2)");
  std::vector<int> out;
  for (double e : expectations) out.push_back(e <= eps ? 0 : (e >= 1.0 - eps ? 1 : kColorStar));
  return out;
}

std::vector<int> chi_coloring(std::span<const FunctionTable> phis, std::span<const ProductMeasure> measures,
                              double eps) {
  if (phis.size() != measures.size()) throw DomainError("one measure per function is required");
  std::vector<double> e;
  for (std::size_t j = 0; j < phis.size(); ++j) e.push_back(expectation(phis[j], measures[j]));
  return chi_coloring(e, eps);
}

double joint_value_probability(const Predicate& P, std::span<const FunctionTable> phis, std::span<const Symbol> alpha,
                               Index cap) {
  if (static_cast<int>(alpha.size()) != P.arity()) throw DomainError("target has wrong length");
  auto dist = output_distribution(P, phis, Engine::Auto, cap);
  return dist[encode(alpha, P.alphabet_size())];
}

Restriction sample_restriction(const StarLaw& law, int n, std::uint64_t seed) {
  std::vector<double> probs;
  for (const auto& pat : law.patterns()) probs.push_back(pat.probability);
  DiscreteSampler sampler(probs);
  CounterRng rng(seed);
  Restriction rho(static_cast<std::size_t>(n));
  for (auto& r : rho) r = static_cast<int>(sampler(rng));
  return rho;
}

PartialAssignment restriction_view(const StarLaw& law, std::span<const int> rho, int j) {
  std::vector<int> e;
  e.reserve(rho.size());
  for (int k : rho) {
    const auto& pat = law.patterns()[static_cast<std::size_t>(k)];
    e.push_back(pat.star == j ? PartialAssignment::kStar : pat.base[static_cast<std::size_t>(j)]);
  }
  return PartialAssignment(std::move(e));
}

double joint_value_probability(const Predicate& P, const StarLaw& law, std::span<const int> rho,
                               std::span<const FunctionTable> phis, std::span<const Symbol> alpha) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  if (static_cast<int>(phis.size()) != m || static_cast<int>(alpha.size()) != m) {
    throw DomainError("one function and one target symbol per coordinate are required");
  }
  double prob = 1.0;
  for (int j = 0; j < m; ++j) {
    const auto& phi = phis[static_cast<std::size_t>(j)];
    if (phi.n() != static_cast<int>(rho.size())) throw DomainError("restriction length differs from the function's");
    auto g = restrict(phi, restriction_view(law, rho, j));
    auto w = marginal_product_weights(P.marginal(j), g.n(), s);
    CompensatedSum acc;
    for (Index x = 0; x < g.size(); ++x) {
      if (g.symbol(x) == alpha[static_cast<std::size_t>(j)]) acc.add(w[x]);
    }
    prob *= acc.value();
  }
  return prob;
}

double joint_value_probability_brute(const Predicate& P, const StarLaw& law, std::span<const int> rho,
                                     std::span<const FunctionTable> phis, std::span<const Symbol> alpha, Index cap) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  const int n = static_cast<int>(rho.size());
  std::vector<std::pair<int, int>> stars;  // (coordinate, starred function)
  std::vector<Point> xs(static_cast<std::size_t>(m), Point(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    const auto& pat = law.patterns()[static_cast<std::size_t>(rho[static_cast<std::size_t>(i)])];
    for (int j = 0; j < m; ++j) xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = pat.base[static_cast<std::size_t>(j)];
    if (pat.star >= 0) stars.emplace_back(i, pat.star);
  }
  Index total = checked_power(s, static_cast<int>(stars.size()), cap);
  CompensatedSum acc;
  for (Index c = 0; c < total; ++c) {
    auto fill = decode(c, static_cast<int>(stars.size()), s);
    double w = 1.0;
    for (std::size_t k = 0; k < stars.size(); ++k) {
      auto [i, j] = stars[k];
      xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = fill[k];
      w *= P.marginal(j)[fill[k]];
    }
    bool hit = true;
    for (int j = 0; j < m && hit; ++j) {
      const auto& phi = phis[static_cast<std::size_t>(j)];
      hit = phi.symbol(phi.encode(xs[static_cast<std::size_t>(j)])) == alpha[static_cast<std::size_t>(j)];
    }
    if (hit) acc.add(w);
  }
  return acc.value();
}

double joint_expectation(const Predicate& P, std::span<const FunctionTable> fs, Index cap) {
  const int n = common_arity(P, fs, false);
  const int m = P.arity();
  const int s = P.alphabet_size();
  if (contraction_cost(P, n) > cap) throw ResourceError("joint expectation exceeds the enumeration cap");
  const Index R = checked_power(s, m - 1, kMaxTableSize);
  auto V = contract_last(P, fs[static_cast<std::size_t>(m) - 1].values(), n);
  PrefixOdometer od(n, m, s, R);
  const auto& idx = od.inputs();
  CompensatedSum acc;
  for (Index y = 0; y < V.size(); ++y, od.advance()) {
    if (V[y] == 0.0) continue;
    double v = V[y];
    for (int j = 0; j + 1 < m; ++j) v *= fs[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    acc.add(v);
  }
  return acc.value();
}

SurvivalEstimate survival_probability(const FunctionTable& f, double q, const ProductMeasure& nu, double delta,
                                      std::uint64_t samples, std::uint64_t seed) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("star rate must lie in (0, 1)");
  if (samples == 0) throw DomainError("at least one sample is required");
  if (f.codomain() == Codomain::Symbol) throw DomainError("survival needs a numeric function");
  const int n = f.n();
  std::vector<DiscreteSampler> coord;
  for (int i = 0; i < n; ++i) coord.emplace_back(nu[i].probs());
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < samples; ++t) {
    CounterRng rng(derive_seed(seed, t));
    std::vector<int> e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      e[static_cast<std::size_t>(i)] = rng.bernoulli(q) ? PartialAssignment::kStar : static_cast<int>(coord[static_cast<std::size_t>(i)](rng));
    }
    PartialAssignment a(std::move(e));
    auto g = restrict(f, a);
    if (expectation(g, nu.select(a.free_set())) >= delta - 1e-12) ++hits;
  }
  return {static_cast<double>(hits) / static_cast<double>(samples), samples, wilson_interval(hits, samples)};
}

double survival_probability_exact(const FunctionTable& f, double q, const ProductMeasure& nu, double delta, Index cap) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("star rate must lie in (0, 1)");
  const int n = f.n();
  const int s = f.alphabet_size();
  Index total = checked_power(s + 1, n, cap);
  CompensatedSum acc;
  for (Index c = 0; c < total; ++c) {
    auto digits = decode(c, n, s + 1);
    std::vector<int> e(static_cast<std::size_t>(n));
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      int d = digits[static_cast<std::size_t>(i)];
      if (d == s) {
        e[static_cast<std::size_t>(i)] = PartialAssignment::kStar;
        w *= q;
      } else {
        e[static_cast<std::size_t>(i)] = d;
        w *= (1.0 - q) * nu[i][d];
      }
    }
    PartialAssignment a(std::move(e));
    auto g = restrict(f, a);
    if (expectation(g, nu.select(a.free_set())) >= delta - 1e-12) acc.add(w);
  }
  return acc.value();
}

}  // namespace genpoly
