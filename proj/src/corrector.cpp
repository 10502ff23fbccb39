#include "genpoly/corrector.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>

#include "genpoly/errors.hpp"
#include "genpoly/harmonics.hpp"
#include "genpoly/rng.hpp"
#include "numeric.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

constexpr double kStochasticTolerance = 1e-12;
constexpr double kTieTolerance = 1e-12;

int common_n(std::span<const FunctionTable> fs, int m) {
  if (static_cast<int>(fs.size()) != m) throw DomainError("one function per predicate coordinate is required");
  const int n = fs[0].n();
  for (const auto& f : fs) {
    if (f.n() != n) throw DomainError("functions must share n");
  }
  return n;
}

void require_discrete(std::span<const FunctionTable> fs, const Predicate& P) {
  for (const auto& f : fs) {
    if (f.alphabet_size() != P.alphabet_size()) throw DomainError("function alphabet differs from the predicate's");
    if (!f.is_discrete() || f.output_size() != P.alphabet_size()) {
      throw DomainError("functions must map Sigma^n to Sigma");
    }
  }
}

/// Product weights over Sigma^n for a marginal that may miss symbols.
std::vector<double> product_weights(std::span<const double> marginal, int n) {
  const int s = static_cast<int>(marginal.size());
  std::vector<double> w(checked_power(s, n, kMaxTableSize), 1.0);
  Index stride = 1;
  for (int i = 0; i < n; ++i) {
    for (Index x = 0; x < w.size(); ++x) w[x] *= marginal[static_cast<std::size_t>((x / stride) % s)];
    stride *= static_cast<Index>(s);
  }
  return w;
}

double weighted_distance(const FunctionTable& f, const FunctionTable& g, std::span<const double> w) {
  CompensatedSum acc;
  for (Index x = 0; x < f.size(); ++x) {
    double diff = std::abs(f[x] - g[x]);
    if (diff != 0.0) acc.add(w[x] * (f.is_discrete() ? 1.0 : diff));
  }
  return acc.value();
}

ProductMeasure marginal_product(const Predicate& P, int j, int n) {
  return ProductMeasure::iid(n, P.marginal_measure(j));
}

FunctionTable constant_cell(int n, double v, const FunctionTable& like) {
  return FunctionTable(n, like.alphabet_size(), like.codomain(), std::vector<double>(checked_power(like.alphabet_size(), n, kMaxTableSize), v));
}

/// f's view of a star-law restriction: J free, starred coordinates free, the
/// rest fixed to the pattern's base symbol.
PartialAssignment cell_view(const StarLaw& law, int n, std::span<const int> J, std::span<const int> rho, int j) {
  std::vector<int> e(static_cast<std::size_t>(n), PartialAssignment::kStar);
  const auto free = complement(n, J);
  if (free.size() != rho.size()) throw DomainError("restriction must cover every coordinate outside J");
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto& pat = law.patterns()[static_cast<std::size_t>(rho[k])];
    if (pat.star != j) e[static_cast<std::size_t>(free[k])] = pat.base[static_cast<std::size_t>(j)];
  }
  return PartialAssignment(std::move(e));
}

/// Positions of J inside the free coordinates of a view.
std::vector<int> local_positions(const PartialAssignment& a, std::span<const int> J) {
  std::vector<int> out;
  const auto& free = a.free_set();
  for (int i : J) out.push_back(static_cast<int>(std::lower_bound(free.begin(), free.end(), i) - free.begin()));
  return out;
}

/// Per-cell symbol probabilities of f_j restricted by rho, stars completed from mu|_j.
std::vector<std::vector<double>> restricted_cell_laws(const Predicate& P, const StarLaw& law, const FunctionTable& f,
                                                      int j, std::span<const int> J, std::span<const int> rho) {
  const int n = f.n();
  auto view = cell_view(law, n, J, rho, j);
  auto h = restrict(f, view);
  auto localJ = local_positions(view, J);
  const auto mu = P.marginal_measure(j);
  const int stars = h.n() - static_cast<int>(J.size());
  const auto star_w = product_weights(mu.probs(), stars);
  const int outputs = f.output_size();
  std::vector<std::vector<double>> laws(checked_power(f.alphabet_size(), static_cast<int>(J.size()), kMaxTableSize),
                                        std::vector<double>(static_cast<std::size_t>(outputs), 0.0));
  for_each_cell(h, localJ, ProductMeasure::iid(static_cast<int>(J.size()), mu), [&](const Cell& c) {
    auto& l = laws[c.index];
    for (Index y = 0; y < c.subfunction.size(); ++y) {
      l[static_cast<std::size_t>(c.subfunction.symbol(y))] += star_w[y];
    }
  });
  return laws;
}

std::string join(std::span<const int> v) {
  std::string out;
  for (int i : v) {
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1);
  }
  return out;
}

void note_symmetry(CorrectionResult& r, const Predicate& P, std::span<const FunctionTable> fs) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      if (fs[i] == fs[j] && P.marginal(static_cast<int>(i)) == P.marginal(static_cast<int>(j)) && !(r.gs[i] == r.gs[j])) {
        r.notes.push_back("symmetry broken: f" + std::to_string(i + 1) + " = f" + std::to_string(j + 1) +
                          " but the outputs differ");
      }
    }
  }
}

void finish(CorrectionResult& r, const Predicate& P, std::span<const FunctionTable> fs, const CorrectionParams& params) {
  const int n = fs[0].n();
  r.distances.clear();
  for (int j = 0; j < P.arity(); ++j) {
    r.distances.push_back(weighted_distance(fs[static_cast<std::size_t>(j)], r.gs[static_cast<std::size_t>(j)],
                                            product_weights(P.marginal(j), n)));
  }
  r.budget = params.budget.value_or(params.eps);
  r.check = verify_exactness(P, r.gs, params.verify_cap);
  r.exact = r.check.exact;
  bool within = std::all_of(r.distances.begin(), r.distances.end(), [&](double d) { return d <= r.budget + 1e-12; });
  if (!r.exact) r.notes.push_back("output is not a generalized polymorphism");
  if (!within) r.notes.push_back("a distance exceeds the budget " + text::format_double(r.budget));
  r.accepted = r.exact && within && r.accepted;
  note_symmetry(r, P, fs);
}

/// Regularity over the given functions; on a cap overrun the run is rejected.
std::optional<RegularityCertificate> regularize(CorrectionResult& r, std::span<const FunctionTable> fs,
                                                std::span<const ProductMeasure> mus, int d, double tau, double eps,
                                                std::span<const int> seed_set, Index cap) {
  try {
    return build_junta_lowdeg(fs, mus, d, tau, eps, seed_set, cap);
  } catch (const RegularityResourceError& e) {
    r.certificate = e.partial();
    r.notes.push_back(std::string("regularity: ") + e.what());
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(CellDecision d) {
  switch (d) {
    case CellDecision::Kept: return "kept";
    case CellDecision::Zeroed: return "zeroed";
    case CellDecision::Fixed0: return "fixed-0";
    case CellDecision::Fixed1: return "fixed-1";
    case CellDecision::Rounded: return "rounded";
    case CellDecision::One: return "one";
  }
  return "?";
}

std::string_view to_string(OutputRole r) {
  switch (r) {
    case OutputRole::CellRule: return "cells";
    case OutputRole::Copied: return "copied";
    case OutputRole::Character: return "character";
    case OutputRole::Constant: return "constant";
    case OutputRole::ClassCopy: return "class-copy";
  }
  return "?";
}

std::vector<int> relevant_coordinates(const FunctionTable& g) {
  const int s = g.alphabet_size();
  std::vector<int> out;
  Index stride = 1;
  for (int i = 0; i < g.n(); ++i) {
    bool relevant = false;
    for (Index x = 0; x < g.size() && !relevant; ++x) {
      if ((x / stride) % static_cast<Index>(s) != 0) continue;
      for (int a = 1; a < s; ++a) {
        if (g[x + static_cast<Index>(a) * stride] != g[x]) {
          relevant = true;
          break;
        }
      }
    }
    if (relevant) out.push_back(i);
    stride *= static_cast<Index>(s);
  }
  return out;
}

ExactnessCheck verify_exactness(const Predicate& P, std::span<const FunctionTable> gs, Index cap) {
  const int n = common_n(gs, P.arity());
  ExactnessCheck out;
  if (std::min(odometer_cost(P, n), contraction_cost(P, n)) <= cap) {
    for (int i = 0; i < n; ++i) out.coordinates.push_back(i);
    auto r = is_generalized_polymorphism(P, gs, cap);
    out.exact = r.holds;
    out.counterexample = std::move(r.counterexample);
    return out;
  }
  std::vector<int> K;
  for (const auto& g : gs) {
    auto rel = relevant_coordinates(g);
    K.insert(K.end(), rel.begin(), rel.end());
  }
  std::sort(K.begin(), K.end());
  K.erase(std::unique(K.begin(), K.end()), K.end());
  const int k = static_cast<int>(K.size());
  if (std::min(odometer_cost(P, k), contraction_cost(P, k)) > cap) {
    throw ResourceError("exactness check needs " + std::to_string(k) + " relevant coordinates, over the cap");
  }
  // Outside K the functions are constant, so fix those coordinates to the
  // symbols of one member of P and check on K.
  const auto& w = P.member(0);
  std::vector<FunctionTable> reduced;
  for (int j = 0; j < P.arity(); ++j) {
    std::vector<int> e(static_cast<std::size_t>(n), w[static_cast<std::size_t>(j)]);
    for (int i : K) e[static_cast<std::size_t>(i)] = PartialAssignment::kStar;
    reduced.push_back(restrict(gs[static_cast<std::size_t>(j)], PartialAssignment(e)));
  }
  auto r = is_generalized_polymorphism(P, reduced, cap);
  out.coordinates = K;
  out.exact = r.holds;
  if (r.counterexample) {
    std::vector<Point> xs;
    for (int j = 0; j < P.arity(); ++j) {
      Point x(static_cast<std::size_t>(n), static_cast<Symbol>(w[static_cast<std::size_t>(j)]));
      for (int t = 0; t < k; ++t) {
        x[static_cast<std::size_t>(K[static_cast<std::size_t>(t)])] =
            (*r.counterexample)[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      }
      xs.push_back(std::move(x));
    }
    out.counterexample = std::move(xs);
  }
  return out;
}

void CorrectionResult::write(std::ostream& out) const {
  using text::format_double;
  out << "correction pipeline=" << pipeline << " status=" << (accepted ? "accepted" : "rejected")
      << " exact=" << (exact ? 1 : 0) << " checked_on=" << check.coordinates.size() << "\n";
  out << "J=" << join(J) << "\n";
  out << "eta=" << format_double(eta) << " budget=" << format_double(budget) << "\n";
  if (restriction && law) {
    out << "restriction";
    for (int k : *restriction) {
      const auto& pat = law->patterns()[static_cast<std::size_t>(k)];
      out << ' ';
      for (std::size_t j = 0; j < pat.base.size(); ++j) {
        if (static_cast<int>(j) == pat.star) {
          out << '*';
        } else {
          out << static_cast<int>(pat.base[j]);
        }
      }
    }
    out << "\n";
  }
  for (std::size_t j = 0; j < gs.size(); ++j) {
    out << "function " << j + 1 << " role=" << to_string(roles[j]) << " distance=" << format_double(distances[j]);
    if (j < decisions.size() && !decisions[j].empty()) {
      std::array<int, 6> counts{};
      for (auto d : decisions[j]) ++counts[static_cast<std::size_t>(d)];
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > 0) out << ' ' << to_string(static_cast<CellDecision>(k)) << '=' << counts[k];
      }
    }
    out << "\n";
  }
  if (!J.empty() && J.size() <= 8) {
    for (std::size_t j = 0; j < decisions.size(); ++j) {
      for (std::size_t c = 0; c < decisions[j].size(); ++c) {
        out << "cell function=" << j + 1 << " x=";
        auto x = decode(c, static_cast<int>(J.size()), gs[j].alphabet_size());
        for (auto v : x) out << static_cast<int>(v);
        out << " decision=" << to_string(decisions[j][c]) << "\n";
      }
    }
  }
  if (!attempts.empty()) {
    int certified = 0;
    for (const auto& a : attempts) certified += a.exact && a.characters_preserved;
    out << "attempts=" << attempts.size() << " certified=" << certified << "\n";
  }
  if (check.counterexample) {
    out << "counterexample";
    for (const auto& x : *check.counterexample) out << ' ' << format_point(x, gs[0].alphabet_size());
    out << "\n";
  }
  for (const auto& n : notes) out << "note " << n << "\n";
}

CorrectionResult correct_monotone(const Predicate& P, std::span<const FunctionTable> fs,
                                  const CorrectionParams& params) {
  if (P.alphabet_size() != 2) throw DomainError("monotone correction needs a binary predicate");
  if (!is_monotone(P)) throw DomainError("predicate is not monotone");
  if (!(P.min_weight() > 0.0)) throw DomainError("predicate weights must be positive");
  const int m = P.arity();
  const int n = common_n(fs, m);
  require_discrete(fs, P);

  CorrectionResult r;
  r.pipeline = "monotone";
  r.accepted = true;
  r.gs.assign(fs.begin(), fs.end());
  r.roles.assign(static_cast<std::size_t>(m), OutputRole::Copied);
  r.decisions.resize(static_cast<std::size_t>(m));
  const double half = params.eps / 2;
  r.eta = half;

  std::vector<int> active;
  for (int j = 0; j < m; ++j) {
    if (P.marginal(j)[1] > 0.0) active.push_back(j);
  }
  if (!active.empty()) {
    std::vector<FunctionTable> fq;
    std::vector<ProductMeasure> mus;
    for (int j : active) {
      fq.push_back(fs[static_cast<std::size_t>(j)]);
      mus.push_back(marginal_product(P, j, n));
    }
    auto cert = regularize(r, fq, mus, params.d, params.tau, half, {}, params.cell_cap);
    if (!cert) {
      r.accepted = false;
      finish(r, P, fs, params);
      return r;
    }
    r.J = cert->J;
    r.certificate = std::move(cert);
    const auto free = complement(n, r.J);
    for (std::size_t t = 0; t < active.size(); ++t) {
      const int j = active[t];
      const auto nu_free = mus[t].select(free);
      std::vector<FunctionTable> cells;
      auto& dec = r.decisions[static_cast<std::size_t>(j)];
      for_each_cell(fq[t], r.J, mus[t].select(r.J), [&](const Cell& c) {
        bool regular = is_regular(c.subfunction, params.d, params.tau, nu_free).regular;
        if (!regular || expectation(c.subfunction, nu_free) <= half) {
          cells.push_back(constant_cell(static_cast<int>(free.size()), 0.0, c.subfunction));
          dec.push_back(CellDecision::Zeroed);
        } else {
          cells.push_back(c.subfunction);
          dec.push_back(CellDecision::Kept);
        }
      });
      r.gs[static_cast<std::size_t>(j)] = assemble_cells(n, r.J, cells);
      r.roles[static_cast<std::size_t>(j)] = OutputRole::CellRule;
    }
  }
  finish(r, P, fs, params);
  return r;
}

RoundedCells round_general_cells(const Predicate& P, const StarLaw& law, std::span<const FunctionTable> fs,
                                 std::span<const int> J, std::span<const int> rho, double eta) {
  const int m = P.arity();
  const int n = common_n(fs, m);
  RoundedCells out;
  for (int j = 0; j < m; ++j) {
    const auto& f = fs[static_cast<std::size_t>(j)];
    auto laws = restricted_cell_laws(P, law, f, j, J, rho);
    const int rest = n - static_cast<int>(J.size());
    std::vector<FunctionTable> cells;
    std::vector<CellDecision> dec;
    for_each_cell(f, J, ProductMeasure::uniform(static_cast<int>(J.size()), 2), [&](const Cell& c) {
      double e = laws[c.index][1];
      if (e <= eta) {
        cells.push_back(constant_cell(rest, 0.0, f));
        dec.push_back(CellDecision::Fixed0);
      } else if (e >= 1.0 - eta) {
        cells.push_back(constant_cell(rest, 1.0, f));
        dec.push_back(CellDecision::Fixed1);
      } else {
        cells.push_back(c.subfunction);
        dec.push_back(CellDecision::Kept);
      }
    });
    out.gs.push_back(assemble_cells(n, J, cells));
    out.decisions.push_back(std::move(dec));
  }
  return out;
}

RoundedCells round_alphabet_cells(const Predicate& P, const StarLaw& law, std::span<const FunctionTable> fs,
                                  std::span<const int> J, std::span<const int> rho, double eta) {
  const int m = P.arity();
  const int n = common_n(fs, m);
  const int s = P.alphabet_size();
  RoundedCells out;
  for (int j = 0; j < m; ++j) {
    const auto& f = fs[static_cast<std::size_t>(j)];
    auto laws = restricted_cell_laws(P, law, f, j, J, rho);
    std::vector<FunctionTable> cells;
    std::vector<CellDecision> dec;
    for_each_cell(f, J, ProductMeasure::uniform(static_cast<int>(J.size()), s), [&](const Cell& c) {
      const auto& l = laws[c.index];
      int top = 0;
      for (int a = 1; a < static_cast<int>(l.size()); ++a) {
        if (l[static_cast<std::size_t>(a)] > l[static_cast<std::size_t>(top)]) top = a;
      }
      std::vector<double> vals(c.subfunction.values().begin(), c.subfunction.values().end());
      bool changed = false;
      for (auto& v : vals) {
        if (l[static_cast<std::size_t>(v)] < eta) {
          v = top;
          changed = true;
        }
      }
      cells.push_back(c.subfunction.with_values(std::move(vals)));
      dec.push_back(changed ? CellDecision::Rounded : CellDecision::Kept);
    });
    out.gs.push_back(assemble_cells(n, J, cells));
    out.decisions.push_back(std::move(dec));
  }
  return out;
}

namespace {

struct SearchOutcome {
  std::optional<RoundedCells> best;
  Restriction rho;
  bool certified = false;
};

/// Samples restrictions and keeps the best rounding: certified first (exact,
/// and the listed outputs left unchanged), then by total distance.
template <class Round>
SearchOutcome search_restrictions(CorrectionResult& r, const Predicate& P, const StarLaw& law,
                                  std::span<const FunctionTable> fs, std::span<const FunctionTable> originals,
                                  std::span<const int> preserved, const CorrectionParams& params, Round round) {
  const int n = fs[0].n();
  const int rest = n - static_cast<int>(r.J.size());
  std::vector<std::vector<double>> weights;
  for (int j = 0; j < P.arity(); ++j) weights.push_back(product_weights(P.marginal(j), n));
  SearchOutcome out;
  double best_distance = 0.0;
  for (int t = 0; t < params.attempts; ++t) {
    AttemptRecord rec;
    rec.seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
    auto rho = sample_restriction(law, rest, rec.seed);
    auto cand = round(rho);
    for (int j : preserved) {
      if (!(cand.gs[static_cast<std::size_t>(j)] == fs[static_cast<std::size_t>(j)])) rec.characters_preserved = false;
    }
    for (int j = 0; j < P.arity(); ++j) {
      rec.total_distance += weighted_distance(originals[static_cast<std::size_t>(j)], cand.gs[static_cast<std::size_t>(j)],
                                              weights[static_cast<std::size_t>(j)]);
    }
    // Exactness is only needed when the candidate could still win.
    bool could_win = !out.best || (rec.characters_preserved && (!out.certified || rec.total_distance < best_distance));
    if (could_win && rec.characters_preserved) rec.exact = verify_exactness(P, cand.gs, params.verify_cap).exact;
    bool certified = rec.exact && rec.characters_preserved;
    bool better = !out.best || (certified && !out.certified) ||
                  (certified == out.certified && rec.total_distance < best_distance);
    if (better) {
      out.best = std::move(cand);
      out.rho = rho;
      out.certified = certified;
      best_distance = rec.total_distance;
    }
    r.attempts.push_back(rec);
  }
  return out;
}

}  // namespace

CorrectionResult correct_general(const Predicate& P, std::span<const FunctionTable> fs,
                                 const CorrectionParams& params) {
  if (P.alphabet_size() != 2) throw DomainError("general correction needs a binary predicate");
  if (!(P.min_weight() > 0.0)) throw DomainError("predicate weights must be positive");
  const int m = P.arity();
  const int n = common_n(fs, m);
  require_discrete(fs, P);

  CorrectionResult r;
  r.pipeline = "general";
  r.accepted = true;
  r.eta = params.eta.value_or(params.eps / 2);
  r.gs.assign(fs.begin(), fs.end());
  r.roles.assign(static_cast<std::size_t>(m), OutputRole::CellRule);
  r.decisions.resize(static_cast<std::size_t>(m));

  const auto sr = classify_short_relations(P);
  const auto& reps = sr.representatives;
  for (int j = 0; j < m; ++j) {
    if (sr.constant_value[static_cast<std::size_t>(j)] >= 0) {
      r.gs[static_cast<std::size_t>(j)] = make::constant(n, 2, Codomain::Bit, sr.constant_value[static_cast<std::size_t>(j)]);
      r.roles[static_cast<std::size_t>(j)] = OutputRole::Constant;
    }
  }
  if (reps.empty()) {
    finish(r, P, fs, params);
    return r;
  }

  // Representative predicate: no constant and no equal or negated coordinates.
  const auto P1 = project(P, reps);
  const int m1 = static_cast<int>(reps.size());
  std::vector<FunctionTable> f1;
  for (int j : reps) f1.push_back(fs[static_cast<std::size_t>(j)]);

  auto peel = peel_affine_relations(P1, f1);
  for (int c : peel.conflicts) r.notes.push_back("character conflict on coordinate " + std::to_string(reps[static_cast<std::size_t>(c)] + 1));
  if (!peel.unique_extension) r.notes.push_back("peeled predicate does not extend uniquely");
  if (!peel.conflicts.empty() || !peel.unique_extension) r.accepted = false;

  std::vector<FunctionTable> f1p = f1;  // f'_j
  std::vector<bool> in_F(static_cast<std::size_t>(m1), false), in_I(static_cast<std::size_t>(m1), false);
  for (int j : peel.F) in_F[static_cast<std::size_t>(j)] = true;
  for (int j : peel.I) in_I[static_cast<std::size_t>(j)] = true;
  for (int j = 0; j < m1; ++j) {
    if (peel.characters[static_cast<std::size_t>(j)]) f1p[static_cast<std::size_t>(j)] = peel.characters[static_cast<std::size_t>(j)]->chi.table(n);
  }

  // Seed J with the supports of characters that are neither inside J nor large.
  std::vector<int> J0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int j : peel.I) {
      if (in_F[static_cast<std::size_t>(j)]) continue;
      auto S = peel.characters[static_cast<std::size_t>(j)]->chi.support_list();
      std::vector<int> outside;
      std::set_difference(S.begin(), S.end(), J0.begin(), J0.end(), std::back_inserter(outside));
      if (!outside.empty() && static_cast<int>(outside.size()) < params.large_character) {
        J0.insert(J0.end(), outside.begin(), outside.end());
        std::sort(J0.begin(), J0.end());
        changed = true;
      }
    }
  }

  std::vector<int> J = J0;
  if (!peel.F.empty()) {
    std::vector<FunctionTable> fF;
    std::vector<ProductMeasure> mus;
    for (int j : peel.F) {
      fF.push_back(f1p[static_cast<std::size_t>(j)]);
      mus.push_back(marginal_product(P1, j, n));
    }
    auto cert = regularize(r, fF, mus, params.d, params.tau, params.eps, J0, params.cell_cap);
    if (!cert) {
      r.accepted = false;
      finish(r, P, fs, params);
      return r;
    }
    J = cert->J;
    r.certificate = std::move(cert);
  }
  r.J = J;

  // Round on P|_I with a searched restriction.
  const auto PI = project(P1, peel.I);
  std::vector<FunctionTable> fI, origI;
  std::vector<int> preserved;
  for (std::size_t t = 0; t < peel.I.size(); ++t) {
    const int j = peel.I[t];
    fI.push_back(f1p[static_cast<std::size_t>(j)]);
    origI.push_back(f1[static_cast<std::size_t>(j)]);
    if (!in_F[static_cast<std::size_t>(j)]) preserved.push_back(static_cast<int>(t));
  }
  auto law = star_law(PI, StarMode::General, params.q);
  auto found = search_restrictions(r, PI, law, fI, origI, preserved, params, [&](const Restriction& rho) {
    return round_general_cells(PI, law, fI, J, rho, r.eta);
  });
  if (!found.certified) {
    r.accepted = false;
    r.notes.push_back("no restriction in " + std::to_string(params.attempts) + " attempts gave an exact rounding");
  }
  r.restriction = found.rho;
  r.law = law;

  // Extend: P|_I -> P1 by characters, P1 -> P by constants and class copies.
  std::vector<FunctionTable> g1 = f1p;
  std::vector<std::vector<CellDecision>> d1(static_cast<std::size_t>(m1));
  for (std::size_t t = 0; t < peel.I.size(); ++t) {
    g1[static_cast<std::size_t>(peel.I[t])] = found.best->gs[t];
    d1[static_cast<std::size_t>(peel.I[t])] = found.best->decisions[t];
  }
  for (int j = 0; j < m; ++j) {
    if (sr.constant_value[static_cast<std::size_t>(j)] >= 0) continue;
    const int rep = sr.representative[static_cast<std::size_t>(j)];
    const int k = static_cast<int>(std::lower_bound(reps.begin(), reps.end(), rep) - reps.begin());
    const auto& g = g1[static_cast<std::size_t>(k)];
    if (rep == j) {
      r.gs[static_cast<std::size_t>(j)] = g;
      r.roles[static_cast<std::size_t>(j)] = in_I[static_cast<std::size_t>(k)] ? OutputRole::CellRule : OutputRole::Character;
      r.decisions[static_cast<std::size_t>(j)] = d1[static_cast<std::size_t>(k)];
    } else {
      // A negated member sees the complemented column: g_j(y) = 1 - g_rep(not y).
      std::vector<double> vals(g.values().begin(), g.values().end());
      if (sr.negated[static_cast<std::size_t>(j)]) {
        const Index top = g.size() - 1;
        for (Index y = 0; y < g.size(); ++y) vals[y] = 1.0 - g[top ^ y];
      }
      r.gs[static_cast<std::size_t>(j)] = g.with_values(std::move(vals));
      r.roles[static_cast<std::size_t>(j)] = OutputRole::ClassCopy;
    }
  }
  finish(r, P, fs, params);
  return r;
}

CorrectionResult correct_alphabet(const Predicate& P, std::span<const FunctionTable> fs,
                                  const CorrectionParams& params) {
  if (!(P.min_weight() > 0.0)) throw DomainError("predicate weights must be positive");
  const int m = P.arity();
  const int n = common_n(fs, m);
  const int s = P.alphabet_size();
  require_discrete(fs, P);
  auto flex = flexible_coordinates(P);
  for (int j = 0; j < m; ++j) {
    if (!flex[static_cast<std::size_t>(j)].flexible) {
      throw DomainError("coordinate " + std::to_string(j + 1) + " is not flexible");
    }
  }
  CorrectionResult r;
  r.pipeline = "alphabet";
  r.accepted = true;
  r.eta = params.eta.value_or(std::min(params.eps / 2, 1.0 / s));
  r.gs.assign(fs.begin(), fs.end());
  r.roles.assign(static_cast<std::size_t>(m), OutputRole::CellRule);

  std::vector<ProductMeasure> mus;
  for (int j = 0; j < m; ++j) mus.push_back(marginal_product(P, j, n));
  auto cert = regularize(r, fs, mus, params.d, params.tau, params.eps, {}, params.cell_cap);
  if (!cert) {
    r.accepted = false;
    r.decisions.resize(static_cast<std::size_t>(m));
    finish(r, P, fs, params);
    return r;
  }
  r.J = cert->J;
  r.certificate = std::move(cert);
  auto law = star_law(P, StarMode::General, params.q);
  auto found = search_restrictions(r, P, law, fs, fs, {}, params, [&](const Restriction& rho) {
    return round_alphabet_cells(P, law, fs, r.J, rho, r.eta);
  });
  if (!found.certified) {
    r.accepted = false;
    r.notes.push_back("no restriction in " + std::to_string(params.attempts) + " attempts gave an exact rounding");
  }
  r.gs = found.best->gs;
  r.decisions = found.best->decisions;
  r.restriction = found.rho;
  r.law = law;
  finish(r, P, fs, params);
  return r;
}

CorrectionResult correct_fractional_nand(const FunctionTable& f1, const FunctionTable& f2, double p,
                                         const CorrectionParams& params) {
  if (!(p > 0.0 && p < 0.5)) throw DomainError("p must lie in (0, 1/2)");
  if (f1.n() != f2.n() || f1.alphabet_size() != 2 || f2.alphabet_size() != 2) {
    throw DomainError("f1 and f2 must share a binary domain");
  }
  const int n = f1.n();
  std::vector<FunctionTable> fs{f1.as_real(), f2.as_real()};
  for (const auto& f : fs) {
    for (double v : f.values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("functions must take values in [0,1]");
    }
  }
  const Predicate P(2, 2, {Point{0, 0}, Point{1, 0}, Point{0, 1}}, std::vector<double>{1 - 2 * p, p, p});
  CorrectionResult r;
  r.pipeline = "fractional";
  r.accepted = true;
  const double half = params.eps / 2;
  r.eta = half;
  r.roles.assign(2, OutputRole::CellRule);
  r.decisions.resize(2);
  std::vector<ProductMeasure> mus(2, ProductMeasure::biased(n, p));
  auto cert = regularize(r, fs, mus, params.d, params.tau, half, {}, params.cell_cap);
  if (!cert) {
    r.accepted = false;
    r.gs = {make::constant(n, 2, Codomain::Bit, 0), make::constant(n, 2, Codomain::Bit, 0)};
  } else {
    r.J = cert->J;
    r.certificate = std::move(cert);
    const auto nu_free = mus[0].select(complement(n, r.J));
    const int rest = n - static_cast<int>(r.J.size());
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<FunctionTable> cells;
      for_each_cell(fs[j], r.J, mus[j].select(r.J), [&](const Cell& c) {
        bool regular = is_regular(c.subfunction, params.d, params.tau, nu_free).regular;
        bool one = regular && expectation(c.subfunction, nu_free) > half;
        cells.push_back(FunctionTable(rest, 2, Codomain::Bit,
                                      std::vector<double>(checked_power(2, rest, kMaxTableSize), one ? 1.0 : 0.0)));
        r.decisions[j].push_back(one ? CellDecision::One : CellDecision::Zeroed);
      });
      r.gs.push_back(assemble_cells(n, r.J, cells));
    }
  }
  // Capped-expectation loss E[(1 - g_j) f_j].
  for (std::size_t j = 0; j < 2; ++j) {
    auto w = mus[j].table();
    CompensatedSum loss;
    for (Index x = 0; x < w.size(); ++x) loss.add(w[x] * (1.0 - r.gs[j][x]) * fs[j][x]);
    r.distances.push_back(loss.value());
  }
  r.budget = params.budget.value_or(params.eps);
  r.check = verify_exactness(P, r.gs, params.verify_cap);
  r.exact = r.check.exact;
  bool within = std::all_of(r.distances.begin(), r.distances.end(), [&](double d) { return d <= r.budget + 1e-12; });
  if (!r.exact) r.notes.push_back("output is not a generalized polymorphism");
  if (!within) r.notes.push_back("a loss exceeds the budget " + text::format_double(r.budget));
  r.accepted = r.accepted && r.exact && within;
  if (f1 == f2 && !(r.gs[0] == r.gs[1])) r.notes.push_back("symmetry broken: f1 = f2 but the outputs differ");
  return r;
}

namespace {

template <class T>
void walsh_hadamard(std::vector<T>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t k = i; k < i + h; ++k) {
        T u = a[k], v = a[k + h];
        a[k] = u + v;
        a[k + h] = u - v;
      }
    }
  }
}

void require_boolean(const FunctionTable& f) {
  if (f.alphabet_size() != 2 || !f.is_discrete() || f.output_size() != 2) {
    throw DomainError("character decoding needs a Boolean function on {0,1}^n");
  }
}

}  // namespace

CharacterFit blr_decode_uniform(const FunctionTable& f) {
  require_boolean(f);
  std::vector<std::int64_t> w(f.size());
  for (Index x = 0; x < f.size(); ++x) w[x] = f.symbol(x) ? -1 : 1;
  walsh_hadamard(w);
  std::uint64_t best = 0;
  for (std::uint64_t S = 1; S < w.size(); ++S) {
    auto a = std::llabs(w[S]), b = std::llabs(w[best]);
    if (a > b || (a == b && support_less(S, best))) best = S;
  }
  CharacterFit fit;
  fit.chi = Character{best, w[best] < 0 ? 1 : 0};
  Index wrong = 0;
  for (Index x = 0; x < f.size(); ++x) wrong += f.symbol(x) != fit.chi.eval_index(x);
  fit.distance = static_cast<double>(wrong) / static_cast<double>(f.size());
  fit.max_coefficient = static_cast<double>(std::llabs(w[best])) / static_cast<double>(f.size());
  return fit;
}

CharacterFit nearest_character(const FunctionTable& f, const ProductMeasure& nu) {
  require_boolean(f);
  if (nu.n() != f.n() || nu.alphabet_size() != 2) throw DomainError("measure does not match the function");
  auto w = nu.table();
  for (Index x = 0; x < f.size(); ++x) {
    if (f.symbol(x)) w[x] = -w[x];
  }
  walsh_hadamard(w);
  // Pr[f != chi_{S,0}] = (1 - A(S)) / 2 and Pr[f != chi_{S,1}] = (1 + A(S)) / 2.
  std::uint64_t best_S = 0;
  int best_b = 0;
  double best = (1 - w[0]) / 2;
  auto consider = [&](std::uint64_t S, int b, double d) {
    if (d < best - kTieTolerance) {
      best = d, best_S = S, best_b = b;
    } else if (d <= best + kTieTolerance) {
      if (support_less(S, best_S) || (S == best_S && b < best_b)) best = std::min(best, d), best_S = S, best_b = b;
    }
  };
  consider(0, 1, (1 + w[0]) / 2);
  for (std::uint64_t S = 1; S < w.size(); ++S) {
    consider(S, 0, (1 - w[S]) / 2);
    consider(S, 1, (1 + w[S]) / 2);
  }
  CharacterFit fit;
  fit.chi = Character{best_S, best_b};
  fit.distance = distance(f, fit.chi.table(f.n()), nu);
  fit.max_coefficient = std::abs(w[best_S]);
  return fit;
}

PeelResult peel_affine_relations(const Predicate& P, std::span<const FunctionTable> fs) {
  if (P.alphabet_size() != 2) throw DomainError("affine peeling needs a binary predicate");
  const int m = P.arity();
  const int n = common_n(fs, m);
  const auto relations = affine_relations(P);
  for (const auto& rel : relations) {
    if (std::popcount(rel.support) < 3) throw DomainError("predicate has an affine relation of size below 3");
  }
  PeelResult out;
  out.characters.resize(static_cast<std::size_t>(m));
  std::vector<std::optional<CharacterFit>> decoded(static_cast<std::size_t>(m));
  std::uint64_t active = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
  for (;;) {
    auto it = std::find_if(relations.begin(), relations.end(),
                           [&](const AffineRelation& rel) { return (rel.support & ~active) == 0; });
    if (it == relations.end()) break;
    for (int j = 0; j < m; ++j) {
      if (!((it->support >> j) & 1U)) continue;
      auto& slot = decoded[static_cast<std::size_t>(j)];
      if (!slot) slot = nearest_character(fs[static_cast<std::size_t>(j)], marginal_product(P, j, n));
      auto& listed = out.characters[static_cast<std::size_t>(j)];
      if (!listed) {
        listed = slot;
      } else if (!(listed->chi == slot->chi)) {
        out.conflicts.push_back(j);
      }
    }
    const int drop = 63 - std::countl_zero(it->support);
    active &= ~(std::uint64_t{1} << drop);
    out.steps.push_back({*it, drop});
  }
  for (int j = 0; j < m; ++j) {
    if (!out.characters[static_cast<std::size_t>(j)]) out.F.push_back(j);
    if ((active >> j) & 1U) out.I.push_back(j);
  }
  std::sort(out.conflicts.begin(), out.conflicts.end());
  out.conflicts.erase(std::unique(out.conflicts.begin(), out.conflicts.end()), out.conflicts.end());
  std::vector<int> seen(checked_power(2, m, kMaxTableSize), 0);
  for (const auto& w : P.members()) {
    Index key = 0;
    for (int j : out.I) key |= static_cast<Index>(w[static_cast<std::size_t>(j)]) << j;
    if (++seen[key] > 1) out.unique_extension = false;
  }
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& M) {
  if (M.size < 1 || M.entries.size() != static_cast<std::size_t>(M.size) * static_cast<std::size_t>(M.size)) {
    throw ValidationError("matrix must be square and non-empty");
  }
  Eigen::MatrixXd A(M.size, M.size);
  for (int r = 0; r < M.size; ++r) {
    double row = 0.0;
    for (int c = 0; c < M.size; ++c) {
      A(r, c) = M(r, c);
      row += M(r, c);
      if (M(r, c) < 0.0) throw ValidationError("matrix entries must be nonnegative");
      if (std::abs(M(r, c) - M(c, r)) > kStochasticTolerance) throw ValidationError("matrix must be symmetric");
    }
    if (std::abs(row - 1.0) > kStochasticTolerance) throw ValidationError("matrix rows must sum to 1");
  }
  return A;
}

}  // namespace

std::vector<double> eigenvalues(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(M), Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + M.size);
  std::sort(out.rbegin(), out.rend());
  return out;
}

double second_eigenvalue(const Matrix& M) {
  auto ev = eigenvalues(M);
  return ev.size() > 1 ? ev[1] : 0.0;
}

TransitionChain::TransitionChain(std::vector<Matrix> factors, std::vector<int> psi)
    : factors_(std::move(factors)), psi_(std::move(psi)) {
  if (factors_.empty()) throw ValidationError("a chain needs at least one factor");
  for (const auto& M : factors_) {
    to_eigen(M);
    if (M.size != factors_[0].size) throw ValidationError("factors must share the alphabet");
    for (double v : M.entries) {
      if (!(v > 0.0)) throw ValidationError("factor entries must be strictly positive");
    }
  }
  if (psi_.empty()) throw ValidationError("psi must assign at least one coordinate");
  for (int k : psi_) {
    if (k < 0 || k >= static_cast<int>(factors_.size())) throw ValidationError("psi refers to a missing factor");
  }
}

double TransitionChain::second_eigenvalue() const {
  // Eigenvalues of M_psi are products of one eigenvalue per coordinate; the
  // top one takes 1 everywhere. Track the extremes over the other products.
  std::vector<std::vector<double>> spectra;
  for (const auto& M : factors_) {
    auto ev = eigenvalues(M);
    spectra.emplace_back(ev.begin() + 1, ev.end());
  }
  bool any = false;
  double hi = 0.0, lo = 0.0;
  for (int k : psi_) {
    const auto& rest = spectra[static_cast<std::size_t>(k)];
    bool next_any = any;
    double nhi = any ? hi : -2.0, nlo = any ? lo : 2.0;
    for (double l : rest) {
      next_any = true;
      for (double v : {l, any ? hi * l : l, any ? lo * l : l}) {
        nhi = std::max(nhi, v);
        nlo = std::min(nlo, v);
      }
    }
    any = next_any;
    hi = nhi;
    lo = nlo;
  }
  return any ? hi : 0.0;
}

double TransitionChain::factor_bound() const {
  std::vector<bool> used(factors_.size(), false);
  for (int k : psi_) used[static_cast<std::size_t>(k)] = true;
  double b = 0.0;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (!used[k]) continue;
    auto ev = eigenvalues(factors_[k]);
    for (std::size_t t = 1; t < ev.size(); ++t) b = std::max(b, std::abs(ev[t]));
  }
  return b;
}

AgreementReport markov_agreement(const TransitionChain& chain, const FunctionTable& f) {
  const int y = chain.alphabet_size();
  const int n = chain.n();
  if (f.n() != n || f.alphabet_size() != y || !f.is_discrete()) {
    throw DomainError("f must be a discrete table over Y^n matching the chain");
  }
  AgreementReport rep;
  rep.lambda = chain.second_eigenvalue();
  rep.factor_bound = chain.factor_bound();
  if (rep.lambda >= 1.0 - kStochasticTolerance) throw DomainError("chain does not mix: second eigenvalue is 1");
  const double base = 1.0 / static_cast<double>(f.size());
  const int outputs = f.output_size();
  // Pr[f(x) = f(y) = sigma] = <1_sigma, M_psi 1_sigma> under the uniform law.
  CompensatedSum agree;
  std::vector<Index> counts(static_cast<std::size_t>(outputs), 0);
  for (Index x = 0; x < f.size(); ++x) ++counts[static_cast<std::size_t>(f.symbol(x))];
  for (int sigma = 0; sigma < outputs; ++sigma) {
    if (counts[static_cast<std::size_t>(sigma)] == 0) continue;
    std::vector<double> v(f.size());
    for (Index x = 0; x < f.size(); ++x) v[x] = f.symbol(x) == sigma ? 1.0 : 0.0;
    const auto ind = v;
    Index stride = 1;
    for (int i = 0; i < n; ++i) {
      const auto& M = chain.factors()[static_cast<std::size_t>(chain.psi()[static_cast<std::size_t>(i)])];
      std::vector<double> next(v.size(), 0.0);
      for (Index x = 0; x < v.size(); ++x) {
        const int a = static_cast<int>((x / stride) % static_cast<Index>(y));
        const Index base_x = x - static_cast<Index>(a) * stride;
        double acc = 0.0;
        for (int b = 0; b < y; ++b) acc += M(a, b) * v[base_x + static_cast<Index>(b) * stride];
        next[x] = acc;
      }
      v = std::move(next);
      stride *= static_cast<Index>(y);
    }
    for (Index x = 0; x < v.size(); ++x) {
      if (ind[x] != 0.0) agree.add(base * v[x]);
    }
  }
  rep.disagreement = std::max(0.0, 1.0 - agree.value());
  int top = 0;
  for (int sigma = 1; sigma < outputs; ++sigma) {
    if (counts[static_cast<std::size_t>(sigma)] > counts[static_cast<std::size_t>(top)]) top = sigma;
  }
  rep.sigma = top;
  rep.mismatch = 1.0 - static_cast<double>(counts[static_cast<std::size_t>(top)]) * base;
  rep.bound = rep.disagreement / (1.0 - rep.lambda);
  rep.holds = rep.mismatch <= rep.bound + 1e-12;
  return rep;
}

FunctionTable friedgut_regev_lift(std::span<const std::uint64_t> family, int n, int k) {
  if (n < 0 || n > 30) throw DomainError("n must lie in [0, 30]");
  if (k < 0 || k > n) throw DomainError("k must lie in [0, n]");
  const Index size = checked_power(2, n, kMaxTableSize);
  std::vector<double> g(size, 0.0);
  for (auto S : family) {
    if (S >= size || std::popcount(S) != k) throw ValidationError("family members must be k-subsets of [n]");
    g[S] = 1.0;
  }
  // Subset sums: g[x] = #{S in family : S subset of x}.
  for (int i = 0; i < n; ++i) {
    const Index bit = Index{1} << i;
    for (Index x = 0; x < size; ++x) {
      if (x & bit) g[x] += g[x ^ bit];
    }
  }
  std::vector<double> binom(static_cast<std::size_t>(n) + 1, 0.0);
  for (int t = k; t <= n; ++t) {
    double c = 1.0;
    for (int u = 0; u < k; ++u) c = c * (t - u) / (u + 1);
    binom[static_cast<std::size_t>(t)] = c;
  }
  for (Index x = 0; x < size; ++x) {
    const int w = std::popcount(x);
    g[x] = w >= k ? g[x] / binom[static_cast<std::size_t>(w)] : 0.0;
  }
  return FunctionTable(n, 2, Codomain::Real, std::move(g));
}

namespace {

std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  return lines;
}

}  // namespace

TransitionChain read_chain(std::istream& in) {
  auto lines = content_lines(in);
  if (lines.empty()) throw ParseError("chain file is empty");
  auto header = text::tokens(lines[0]);
  if (header.empty() || header[0] != "chain") throw ParseError("chain file must start with 'chain'");
  auto kv = text::key_values(header, 1);
  const int y = static_cast<int>(text::parse_int(text::require(kv, "y", "chain header")));
  const int t = static_cast<int>(text::parse_int(text::require(kv, "factors", "chain header")));
  if (y < 1 || t < 1) throw ParseError("chain needs y >= 1 and factors >= 1");
  std::vector<Matrix> factors(static_cast<std::size_t>(t));
  std::vector<bool> seen(static_cast<std::size_t>(t), false);
  std::vector<int> psi;
  bool have_psi = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto toks = text::tokens(lines[i]);
    if (toks[0] == "factor") {
      if (toks.size() != 2) throw ParseError("expected 'factor <k>'");
      long long k = text::parse_int(toks[1]);
      if (k < 1 || k > t) throw ParseError("factor index out of range");
      auto& M = factors[static_cast<std::size_t>(k - 1)];
      if (seen[static_cast<std::size_t>(k - 1)]) throw ParseError("factor " + std::to_string(k) + " given twice");
      seen[static_cast<std::size_t>(k - 1)] = true;
      M.size = y;
      for (int r = 0; r < y; ++r) {
        if (++i >= lines.size()) throw ParseError("factor " + std::to_string(k) + " is missing rows");
        auto row = text::tokens(lines[i]);
        if (static_cast<int>(row.size()) != y) throw ParseError("factor rows need " + std::to_string(y) + " entries");
        for (auto v : row) M.entries.push_back(text::parse_double(v));
      }
    } else if (toks[0] == "psi") {
      have_psi = true;
      for (std::size_t k = 1; k < toks.size(); ++k) psi.push_back(static_cast<int>(text::parse_int(toks[k])) - 1);
    } else {
      throw ParseError("unexpected line in chain file: " + lines[i]);
    }
  }
  for (int k = 0; k < t; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) throw ParseError("factor " + std::to_string(k + 1) + " is missing");
  }
  if (!have_psi) throw ParseError("chain file needs a psi line");
  return TransitionChain(std::move(factors), std::move(psi));
}

TransitionChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_chain(in);
}

Family read_family(std::istream& in) {
  auto lines = content_lines(in);
  if (lines.empty()) throw ParseError("family file is empty");
  auto header = text::tokens(lines[0]);
  if (header.empty() || header[0] != "family") throw ParseError("family file must start with 'family'");
  auto kv = text::key_values(header, 1);
  Family fam;
  fam.n = static_cast<int>(text::parse_int(text::require(kv, "n", "family header")));
  fam.k = static_cast<int>(text::parse_int(text::require(kv, "k", "family header")));
  if (fam.n < 0 || fam.n > 30 || fam.k < 0 || fam.k > fam.n) throw ParseError("family needs 0 <= k <= n <= 30");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::uint64_t mask = 0;
    for (int c : text::parse_index_list(lines[i])) {
      if (c >= fam.n) throw ParseError("family member exceeds n: " + lines[i]);
      mask |= std::uint64_t{1} << c;
    }
    if (std::popcount(mask) != fam.k) throw ParseError("family member is not a k-subset: " + lines[i]);
    fam.members.push_back(mask);
  }
  return fam;
}

Family load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_family(in);
}

}  // namespace genpoly
