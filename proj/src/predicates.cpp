#include "genpoly/predicates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "genpoly/errors.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr int kMaxBinaryArityForRelations = 20;

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational pow10(int k) {
  boost::multiprecision::cpp_int v = 1;
  for (int i = 0; i < k; ++i) v *= 10;
  return Rational(v);
}

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void require_binary(const Predicate& P, std::string_view what) {
  if (P.alphabet_size() != 2) throw UnsupportedError(std::string(what) + " is defined for binary predicates only");
  if (P.arity() > kMaxBinaryArityForRelations) throw ResourceError(std::string(what) + ": arity too large");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = text::trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return parse_rational(s.substr(0, slash)) / den;
  }
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int frac = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      seen_digit = true;
      if (seen_point) ++frac;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ParseError("expected a number, got '" + std::string(s) + "'");
  long long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw ParseError("expected a number, got '" + std::string(s) + "'");
    exponent = text::parse_int(s.substr(i + 1));
    if (exponent > 400 || exponent < -400) throw ParseError("exponent out of range in '" + std::string(s) + "'");
  }
  Rational v(digits);
  long long shift = exponent - frac;
  v = shift >= 0 ? v * pow10(static_cast<int>(shift)) : v / pow10(static_cast<int>(-shift));
  return negative ? Rational(-v) : v;
}

// -------------------------------------------------------------- Predicate

Predicate::Predicate(int m, int s, std::vector<Point> members, std::vector<double> weights)
    : m_(m), s_(s), members_(std::move(members)) {
  init(std::move(weights));
}

Predicate::Predicate(int m, int s, std::vector<Point> members, std::vector<Rational> weights)
    : m_(m), s_(s), members_(std::move(members)) {
  std::vector<double> approx;
  approx.reserve(weights.size());
  for (const auto& w : weights) {
    if (w <= 0) throw ValidationError("member weights must be positive");
    approx.push_back(to_double(w));
  }
  init(approx);
  Rational total = 0;
  for (const auto& w : weights) total += w;
  for (auto& w : weights) w /= total;
  for (std::size_t k = 0; k < weights.size(); ++k) weights_[k] = to_double(weights[k]);
  exact_ = std::move(weights);
  for (int j = 0; j < m_; ++j) {
    auto em = exact_marginal(j);
    for (int a = 0; a < s_; ++a) {
      marginals_[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] = to_double(em[static_cast<std::size_t>(a)]);
    }
  }
}

void Predicate::init(std::vector<double> weights) {
  if (m_ < 1) throw ValidationError("predicate arity must be at least 1");
  if (s_ < 2 || s_ > kMaxAlphabet) throw ValidationError("alphabet size must be in [2, 255]");
  if (members_.empty()) throw ValidationError("predicate has no members");
  if (weights.size() != members_.size()) throw ValidationError("one weight per member is required");
  Index codes = checked_power(s_, m_, kMaxTableSize);
  lookup_.assign(codes, -1);
  double total = 0.0;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    const auto& w = members_[k];
    if (static_cast<int>(w.size()) != m_) throw ValidationError("member " + format_point(w, s_) + " has wrong length");
    for (Symbol a : w) {
      if (a >= s_) throw ValidationError("member " + format_point(w, s_) + " has a symbol outside the alphabet");
    }
    Index code = encode(w, s_);
    if (lookup_[code] >= 0) throw ValidationError("duplicate member w=" + format_point(w, s_));
    lookup_[code] = static_cast<int>(k);
    if (!(weights[k] > 0.0)) throw ValidationError("member w=" + format_point(w, s_) + " has nonpositive weight");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("weights sum to " + text::format_double(total) + ", not 1");
  }
  weights_ = std::move(weights);
  marginals_.assign(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(s_), 0.0));
  for (std::size_t k = 0; k < members_.size(); ++k) {
    for (int j = 0; j < m_; ++j) {
      marginals_[static_cast<std::size_t>(j)][members_[k][static_cast<std::size_t>(j)]] += weights_[k];
    }
  }
}

Predicate Predicate::uniform(int m, int s, std::vector<Point> members) {
  std::vector<Rational> w(members.size(), Rational(1, static_cast<long>(std::max<std::size_t>(members.size(), 1))));
  return Predicate(m, s, std::move(members), std::move(w));
}

int Predicate::index_of(std::span<const Symbol> w) const {
  if (static_cast<int>(w.size()) != m_) return -1;
  for (Symbol a : w) {
    if (a >= s_) return -1;
  }
  return lookup_[encode(w, s_)];
}

std::vector<Rational> Predicate::exact_marginal(int j) const {
  if (!exact_) throw UnsupportedError("predicate has no exact weights");
  std::vector<Rational> out(static_cast<std::size_t>(s_), Rational(0));
  for (std::size_t k = 0; k < members_.size(); ++k) out[members_[k][static_cast<std::size_t>(j)]] += (*exact_)[k];
  return out;
}

Measure Predicate::marginal_measure(int j) const {
  const auto& mj = marginal(j);
  for (int a = 0; a < s_; ++a) {
    if (mj[static_cast<std::size_t>(a)] <= 0.0) {
      throw DomainError("coordinate " + std::to_string(j + 1) + " never takes symbol " + std::to_string(a));
    }
  }
  // Renormalize so the Measure check sees an exact float sum.
  std::vector<double> p(mj);
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return Measure(std::move(p));
}

double Predicate::min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }

// --------------------------------------------------------------- builtins

namespace builtin {

namespace {
std::vector<Point> binary_filter(int m, const std::function<bool(const Point&)>& keep) {
  std::vector<Point> out;
  for (Index c = 0; c < (Index{1} << m); ++c) {
    auto w = decode(c, m, 2);
    if (keep(w)) out.push_back(std::move(w));
  }
  return out;
}
int weight_of(const Point& w) {
  int k = 0;
  for (Symbol a : w) k += a;
  return k;
}
}  // namespace

Predicate nand(int m) {
  return Predicate::uniform(m, 2, binary_filter(m, [m](const Point& w) { return weight_of(w) < m; }));
}

Predicate nand2(const Rational& p) {
  if (!(p > 0 && p < Rational(1, 2))) throw ValidationError("nand2 needs 0 < p < 1/2");
  return Predicate(2, 2, {{0, 0}, {1, 0}, {0, 1}}, std::vector<Rational>{1 - 2 * p, p, p});
}

Predicate nand_graph() {
  return Predicate::uniform(3, 2, {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
}

Predicate parity(int m, int b) {
  return Predicate::uniform(m, 2, binary_filter(m, [b](const Point& w) { return (weight_of(w) & 1) == (b & 1); }));
}

Predicate not_all_equal(int m) {
  return Predicate::uniform(m, 2, binary_filter(m, [m](const Point& w) {
                              int k = weight_of(w);
                              return k != 0 && k != m;
                            }));
}

Predicate equality(int m) {
  return Predicate::uniform(m, 2, {Point(static_cast<std::size_t>(m), 0), Point(static_cast<std::size_t>(m), 1)});
}

Predicate one_in_three() { return Predicate::uniform(3, 2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}); }

Predicate full(int m, int s) {
  Index codes = checked_power(s, m, kMaxTableSize);
  std::vector<Point> members;
  for (Index c = 0; c < codes; ++c) members.push_back(decode(c, m, s));
  return Predicate::uniform(m, s, std::move(members));
}

}  // namespace builtin

// --------------------------------------------------------------- analysis

PredicateReport validate(const Predicate& P) {
  PredicateReport r;
  for (int j = 0; j < P.arity(); ++j) r.marginals.push_back(P.marginal(j));
  r.min_weight = P.min_weight();
  r.monotone = P.alphabet_size() == 2 && is_monotone(P);
  for (const auto& f : flexible_coordinates(P)) r.flexible.push_back(f.flexible);
  return r;
}

void write_report(std::ostream& out, const Predicate& P, const PredicateReport& r) {
  out << "valid m=" << P.arity() << " sigma=" << P.alphabet_size() << " members=" << P.size()
      << " exact=" << (P.is_exact() ? "yes" : "no") << "\n";
  out << "min_weight=" << text::format_double(r.min_weight) << "\n";
  for (int j = 0; j < P.arity(); ++j) {
    out << "marginal j=" << j + 1 << " p=";
    for (int a = 0; a < P.alphabet_size(); ++a) {
      out << (a ? "," : "") << text::format_double(r.marginals[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]);
    }
    out << " flexible=" << (r.flexible[static_cast<std::size_t>(j)] ? "yes" : "no") << "\n";
  }
  if (P.alphabet_size() == 2) out << "monotone=" << (r.monotone ? "yes" : "no") << "\n";
}

Predicate project(const Predicate& P, std::span<const int> I) {
  if (I.empty()) throw DomainError("projection needs a non-empty coordinate set");
  for (std::size_t k = 0; k < I.size(); ++k) {
    if (I[k] < 0 || I[k] >= P.arity()) throw DomainError("projection coordinate out of range");
    if (k > 0 && I[k] <= I[k - 1]) throw DomainError("projection coordinates must be sorted and distinct");
  }
  const int m = static_cast<int>(I.size());
  std::map<Index, std::pair<double, Rational>> fibers;
  for (int k = 0; k < P.size(); ++k) {
    Point w(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) w[static_cast<std::size_t>(t)] = P.member(k)[static_cast<std::size_t>(I[static_cast<std::size_t>(t)])];
    auto& slot = fibers[encode(w, P.alphabet_size())];
    slot.first += P.weight(k);
    if (P.is_exact()) slot.second += P.exact_weights()[static_cast<std::size_t>(k)];
  }
  std::vector<Point> members;
  std::vector<double> w;
  std::vector<Rational> wx;
  for (const auto& [code, pr] : fibers) {
    members.push_back(decode(code, m, P.alphabet_size()));
    w.push_back(pr.first);
    wx.push_back(pr.second);
  }
  if (P.is_exact()) return Predicate(m, P.alphabet_size(), std::move(members), std::move(wx));
  return Predicate(m, P.alphabet_size(), std::move(members), std::move(w));
}

std::vector<AffineRelation> affine_relations(const Predicate& P) {
  require_binary(P, "affine relations");
  std::vector<Index> codes;
  for (const auto& w : P.members()) codes.push_back(encode(w, 2));
  std::vector<AffineRelation> out;
  for (std::uint64_t S = 1; S < (std::uint64_t{1} << P.arity()); ++S) {
    int b = std::popcount(codes[0] & S) & 1;
    bool holds = true;
    for (Index c : codes) {
      if ((std::popcount(c & S) & 1) != b) {
        holds = false;
        break;
      }
    }
    if (holds) out.push_back({S, b});
  }
  std::sort(out.begin(), out.end(), [](const AffineRelation& a, const AffineRelation& b) {
    int pa = std::popcount(a.support), pb = std::popcount(b.support);
    if (pa != pb) return pa < pb;
    return support_less(a.support, b.support);
  });
  return out;
}

ShortRelations classify_short_relations(const Predicate& P) {
  require_binary(P, "short relations");
  const int m = P.arity();
  ShortRelations r;
  r.constant_value.assign(static_cast<std::size_t>(m), -1);
  r.representative.assign(static_cast<std::size_t>(m), -1);
  r.negated.assign(static_cast<std::size_t>(m), 0);
  auto column_constant = [&](auto&& value) -> int {
    int v = value(P.member(0));
    for (const auto& w : P.members()) {
      if (value(w) != v) return -1;
    }
    return v;
  };
  for (int j = 0; j < m; ++j) {
    r.constant_value[static_cast<std::size_t>(j)] =
        column_constant([j](const Point& w) { return static_cast<int>(w[static_cast<std::size_t>(j)]); });
  }
  for (int k = 0; k < m; ++k) {
    if (r.constant_value[static_cast<std::size_t>(k)] >= 0) continue;
    for (int j = 0; j < k; ++j) {
      if (r.constant_value[static_cast<std::size_t>(j)] >= 0 || r.representative[static_cast<std::size_t>(j)] != j) continue;
      int c = column_constant([j, k](const Point& w) {
        return static_cast<int>(w[static_cast<std::size_t>(j)] ^ w[static_cast<std::size_t>(k)]);
      });
      if (c >= 0) {
        r.representative[static_cast<std::size_t>(k)] = j;
        r.negated[static_cast<std::size_t>(k)] = c;
        break;
      }
    }
    if (r.representative[static_cast<std::size_t>(k)] < 0) {
      r.representative[static_cast<std::size_t>(k)] = k;
      r.representatives.push_back(k);
    }
  }
  for (int rep : r.representatives) {
    std::vector<int> cls;
    for (int j = 0; j < m; ++j) {
      if (r.representative[static_cast<std::size_t>(j)] == rep) cls.push_back(j);
    }
    r.classes.push_back(std::move(cls));
  }
  return r;
}

std::vector<Flexibility> flexible_coordinates(const Predicate& P) {
  std::vector<Point> sorted = P.members();
  std::sort(sorted.begin(), sorted.end(), lex_less);
  std::vector<Flexibility> out(static_cast<std::size_t>(P.arity()));
  for (int j = 0; j < P.arity(); ++j) {
    for (const auto& w : sorted) {
      if (w[static_cast<std::size_t>(j)] != 0) continue;
      Point v = w;
      bool ok = true;
      for (int a = 1; a < P.alphabet_size() && ok; ++a) {
        v[static_cast<std::size_t>(j)] = static_cast<Symbol>(a);
        ok = P.contains(v);
      }
      if (ok) {
        out[static_cast<std::size_t>(j)] = {true, w};
        break;
      }
    }
  }
  return out;
}

bool is_monotone(const Predicate& P) {
  if (P.alphabet_size() != 2) return false;
  for (const auto& w : P.members()) {
    Point v = w;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 1) {
        v[i] = 0;
        if (!P.contains(v)) return false;
        v[i] = 1;
      }
    }
  }
  return true;
}

std::vector<std::uint64_t> maxterms(const Predicate& P) {
  require_binary(P, "maxterms");
  if (!is_monotone(P)) throw DomainError("maxterms need a monotone predicate");
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << P.arity()); ++x) {
    if (P.contains_code(x)) continue;
    bool minimal = true;
    for (std::uint64_t rest = x; rest != 0 && minimal; rest &= rest - 1) {
      minimal = P.contains_code(x & ~(rest & (~rest + 1)));
    }
    if (minimal) out.push_back(x);
  }
  std::sort(out.begin(), out.end(), [](std::uint64_t a, std::uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return support_less(a, b);
  });
  return out;
}

// --------------------------------------------------------------- star law

StarLaw star_law(const Predicate& P, StarMode mode, std::optional<Rational> q_in) {
  const int m = P.arity();
  const int s = P.alphabet_size();
  std::vector<Flexibility> flex;
  if (mode == StarMode::MonotoneNand) {
    if (s != 2 || !is_monotone(P)) throw DomainError("monotone star law needs a monotone binary predicate");
    Point zero(static_cast<std::size_t>(m), 0);
    for (int j = 0; j < m; ++j) {
      Point e = zero;
      e[static_cast<std::size_t>(j)] = 1;
      if (!P.contains(e)) {
        throw DomainError("monotone star law needs e_" + std::to_string(j + 1) + " in the predicate");
      }
      flex.push_back({true, zero});
    }
  } else {
    flex = flexible_coordinates(P);
  }

  const bool exact = P.is_exact();
  Rational q;
  if (q_in) {
    q = *q_in;
  } else if (P.is_exact()) {
    q = *std::min_element(P.exact_weights().begin(), P.exact_weights().end()) / m;
  } else {
    q = Rational(P.min_weight()) / m;
  }
  if (q < 0) throw DomainError("star probability q must be nonnegative");

  StarLaw law;
  law.m_ = m;
  law.s_ = s;
  law.q_ = to_double(q);
  law.starred_.assign(static_cast<std::size_t>(m), false);
  for (int j = 0; j < m; ++j) law.starred_[static_cast<std::size_t>(j)] = flex[static_cast<std::size_t>(j)].flexible && q > 0;

  auto fail = [&](const Point& w, double p) {
    throw DomainError("q = " + text::format_double(law.q_) + " is too large: pattern w=" + format_point(w, s) +
                      " gets probability " + text::format_double(p));
  };

  std::vector<std::vector<Rational>> exact_marg;
  if (exact) {
    for (int j = 0; j < m; ++j) exact_marg.push_back(P.exact_marginal(j));
  }
  for (int k = 0; k < P.size(); ++k) {
    const Point& w = P.member(k);
    double loss = 0.0;
    Rational xloss = 0;
    for (int j = 0; j < m; ++j) {
      if (!law.starred(j)) continue;
      Point base = flex[static_cast<std::size_t>(j)].witness;
      base[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)];
      if (base != w) continue;
      loss += law.q_ * P.marginal(j)[w[static_cast<std::size_t>(j)]];
      if (exact) xloss += q * exact_marg[static_cast<std::size_t>(j)][w[static_cast<std::size_t>(j)]];
    }
    if (exact) {
      Rational xp = P.exact_weights()[static_cast<std::size_t>(k)] - xloss;
      if (xp < 0) fail(w, to_double(xp));
      if (xp == 0) continue;
      law.patterns_.push_back({w, -1, to_double(xp)});
      law.exact_.push_back(xp);
    } else {
      double p = P.weight(k) - loss;
      if (p < -kNormTolerance) fail(w, p);
      if (p <= 0.0) continue;
      law.patterns_.push_back({w, -1, p});
    }
  }
  for (int j = 0; j < m; ++j) {
    if (!law.starred(j)) continue;
    law.patterns_.push_back({flex[static_cast<std::size_t>(j)].witness, j, law.q_});
    if (exact) law.exact_.push_back(q);
  }
  return law;
}

std::vector<double> StarLaw::compose(const Predicate& P) const {
  std::vector<double> out(checked_power(s_, m_, kMaxTableSize), 0.0);
  for (const auto& pat : patterns_) {
    if (pat.star < 0) {
      out[encode(pat.base, s_)] += pat.probability;
      continue;
    }
    Point w = pat.base;
    for (int a = 0; a < s_; ++a) {
      w[static_cast<std::size_t>(pat.star)] = static_cast<Symbol>(a);
      out[encode(w, s_)] += pat.probability * P.marginal(pat.star)[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

std::vector<Rational> StarLaw::compose_exact(const Predicate& P) const {
  if (!is_exact()) throw UnsupportedError("star law has no exact probabilities");
  std::vector<Rational> out(checked_power(s_, m_, kMaxTableSize), Rational(0));
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    const auto& pat = patterns_[k];
    if (pat.star < 0) {
      out[encode(pat.base, s_)] += exact_[k];
      continue;
    }
    auto mj = P.exact_marginal(pat.star);
    Point w = pat.base;
    for (int a = 0; a < s_; ++a) {
      w[static_cast<std::size_t>(pat.star)] = static_cast<Symbol>(a);
      out[encode(w, s_)] += exact_[k] * mj[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

std::vector<double> StarLaw::conditional_marginal(int j) const {
  std::vector<double> out(static_cast<std::size_t>(s_), 0.0);
  double total = 0.0;
  for (const auto& pat : patterns_) {
    if (pat.star == j) continue;
    out[pat.base[static_cast<std::size_t>(j)]] += pat.probability;
    total += pat.probability;
  }
  for (double& x : out) x /= total;
  return out;
}

std::vector<Rational> StarLaw::exact_conditional_marginal(int j) const {
  if (!is_exact()) throw UnsupportedError("star law has no exact probabilities");
  std::vector<Rational> out(static_cast<std::size_t>(s_), Rational(0));
  Rational total = 0;
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    if (patterns_[k].star == j) continue;
    out[patterns_[k].base[static_cast<std::size_t>(j)]] += exact_[k];
    total += exact_[k];
  }
  for (auto& x : out) x /= total;
  return out;
}

// ---------------------------------------------------------------- file I/O

std::string format_point(std::span<const Symbol> w, int s) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (s > 10 && i > 0) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

namespace {

Point parse_point(std::string_view text, int m, int s) {
  Point w;
  if (text.find(',') != std::string_view::npos || s > 10) {
    for (auto part : text::split(text, ',')) w.push_back(static_cast<Symbol>(text::parse_int(part)));
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw ParseError("bad symbol '" + std::string(1, c) + "' in tuple");
      w.push_back(static_cast<Symbol>(c - '0'));
    }
  }
  if (static_cast<int>(w.size()) != m) throw ParseError("tuple '" + std::string(text) + "' has wrong length");
  return w;
}

Predicate builtin_from(const std::map<std::string, std::string, std::less<>>& kv) {
  const std::string& name = kv.at("builtin");
  auto get_int = [&](std::string_view key) {
    return static_cast<int>(text::parse_int(text::require(kv, key, "builtin " + name)));
  };
  if (name == "nand") return builtin::nand(get_int("m"));
  if (name == "nand2") return builtin::nand2(parse_rational(text::require(kv, "p", "builtin nand2")));
  if (name == "nand_graph") return builtin::nand_graph();
  if (name == "parity") return builtin::parity(get_int("m"), get_int("b"));
  if (name == "nae") return builtin::not_all_equal(get_int("m"));
  if (name == "eq") return builtin::equality(get_int("m"));
  if (name == "one_in_three") return builtin::one_in_three();
  if (name == "full") return builtin::full(get_int("m"), get_int("sigma"));
  throw ParseError("unknown builtin predicate '" + name + "'");
}

}  // namespace

Predicate read_predicate(std::istream& in) {
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  if (lines.empty()) throw ParseError("predicate file is empty");
  auto header = text::tokens(lines[0]);
  if (header.empty() || header[0] != "pred") throw ParseError("predicate file must start with 'pred'");
  auto kv = text::key_values(header, 1);
  if (kv.contains("builtin")) {
    if (lines.size() > 1) throw ParseError("a builtin predicate takes no member lines");
    return builtin_from(kv);
  }
  int m = static_cast<int>(text::parse_int(text::require(kv, "m", "pred header")));
  int s = kv.contains("sigma") ? static_cast<int>(text::parse_int(kv.at("sigma"))) : 2;
  std::vector<Point> members;
  std::vector<Rational> weights;
  int with_weight = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto lkv = text::key_values(text::tokens(lines[k]));
    members.push_back(parse_point(text::require(lkv, "w", "member line"), m, s));
    if (lkv.contains("p")) {
      weights.push_back(parse_rational(lkv.at("p")));
      ++with_weight;
    }
  }
  if (with_weight == 0) return Predicate::uniform(m, s, std::move(members));
  if (with_weight != static_cast<int>(members.size())) throw ParseError("either every member or none carries p=");
  return Predicate(m, s, std::move(members), std::move(weights));
}

void write_predicate(std::ostream& out, const Predicate& P) {
  out << "pred m=" << P.arity() << " sigma=" << P.alphabet_size() << "\n";
  for (int k = 0; k < P.size(); ++k) {
    out << "w=" << format_point(P.member(k), P.alphabet_size()) << " p=";
    if (P.is_exact()) {
      out << P.exact_weights()[static_cast<std::size_t>(k)].str();
    } else {
      out << text::format_double(P.weight(k));
    }
    out << "\n";
  }
}

Predicate load_predicate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open predicate file '" + path + "'");
  try {
    return read_predicate(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace genpoly
