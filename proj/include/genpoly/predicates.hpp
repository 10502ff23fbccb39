#pragma once

// Predicates P in Sigma^m with a full-support distribution mu, their
// structural analysis (projections, affine relations, flexible coordinates,
// maxterms) and the star-restriction laws used by the correction pipelines.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genpoly/funcspace.hpp"

namespace genpoly {

using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a decimal ("0.125", "1e-3") or fraction ("1/3") string.
Rational parse_rational(std::string_view text);

class Predicate {
 public:
  /// Validates: non-empty, no duplicates, symbols in range, weights > 0 and
  /// summing to 1 within 1e-12.
  Predicate(int m, int s, std::vector<Point> members, std::vector<double> weights);
  /// Exact weights; they are renormalized exactly after the float check.
  Predicate(int m, int s, std::vector<Point> members, std::vector<Rational> weights);
  static Predicate uniform(int m, int s, std::vector<Point> members);

  int arity() const { return m_; }
  int alphabet_size() const { return s_; }
  int size() const { return static_cast<int>(members_.size()); }
  const std::vector<Point>& members() const { return members_; }
  const Point& member(int k) const { return members_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int k) const { return weights_[static_cast<std::size_t>(k)]; }
  bool is_exact() const { return exact_.has_value(); }
  const std::vector<Rational>& exact_weights() const { return *exact_; }

  /// Member index of w, or -1.
  int index_of(std::span<const Symbol> w) const;
  bool contains(std::span<const Symbol> w) const { return index_of(w) >= 0; }
  /// Membership by mixed-radix tuple code.
  bool contains_code(Index code) const { return lookup_[code] >= 0; }

  /// mu|_j as probabilities over Sigma (zeros for unrealized symbols).
  const std::vector<double>& marginal(int j) const { return marginals_[static_cast<std::size_t>(j)]; }
  std::vector<Rational> exact_marginal(int j) const;
  /// mu|_j as a Measure; throws when some symbol is never realized.
  Measure marginal_measure(int j) const;
  double min_weight() const;

 private:
  void init(std::vector<double> weights);

  int m_;
  int s_;
  std::vector<Point> members_;
  std::vector<double> weights_;
  std::optional<std::vector<Rational>> exact_;
  std::vector<std::vector<double>> marginals_;
  std::vector<int> lookup_;
};

namespace builtin {
/// {0,1}^m minus the all-ones tuple, uniform.
Predicate nand(int m);
/// 2-ary NAND with mu(0,0) = 1-2p and mu(1,0) = mu(0,1) = p.
Predicate nand2(const Rational& p);
/// {(a, b, not(a and b))}, uniform.
Predicate nand_graph();
/// P_{m,b} = {w : w_1 xor ... xor w_m = b}, uniform.
Predicate parity(int m, int b);
Predicate not_all_equal(int m);
Predicate equality(int m);
Predicate one_in_three();
Predicate full(int m, int s);
}  // namespace builtin

struct PredicateReport {
  std::vector<std::vector<double>> marginals;
  double min_weight = 0.0;
  bool monotone = false;
  std::vector<bool> flexible;
};

PredicateReport validate(const Predicate& P);
void write_report(std::ostream& out, const Predicate& P, const PredicateReport& r);

/// P|_I with the pushed-forward distribution; I sorted and distinct.
Predicate project(const Predicate& P, std::span<const int> I);

struct AffineRelation {
  std::uint64_t support = 0;  // mask over [m]
  int offset = 0;
  bool operator==(const AffineRelation&) const = default;
};

/// Every (S, b) with S non-empty and xor_{i in S} w_i = b on all of P,
/// ordered by |S| then lexicographically.
std::vector<AffineRelation> affine_relations(const Predicate& P);

struct ShortRelations {
  /// value[j] is 0 or 1 for constant coordinates (the set Z), -1 otherwise.
  std::vector<int> constant_value;
  /// Classes of coordinates equal up to negation, each led by its smallest
  /// member; constant coordinates are excluded.
  std::vector<std::vector<int>> classes;
  /// representative[j] for non-constant j, else -1.
  std::vector<int> representative;
  /// negated[j] = 1 when w_j = 1 xor w_{representative[j]} on P.
  std::vector<int> negated;
  /// Sorted class representatives (the set I).
  std::vector<int> representatives;
};

ShortRelations classify_short_relations(const Predicate& P);

struct Flexibility {
  bool flexible = false;
  /// Lexicographically least w in P such that every substitution at j stays
  /// in P; stored with w_j = 0.
  Point witness;
};

std::vector<Flexibility> flexible_coordinates(const Predicate& P);

/// Down-closed under the coordinate order 0 < 1 (binary only).
bool is_monotone(const Predicate& P);
/// Minimal points outside a monotone P, as masks ordered by size then lex.
std::vector<std::uint64_t> maxterms(const Predicate& P);

enum class StarMode { General, MonotoneNand };

struct StarPattern {
  Point base;     // member of P, or the witness with the star slot set to 0
  int star = -1;  // starred coordinate, or -1
  double probability = 0.0;
};

class StarLaw {
 public:
  int arity() const { return m_; }
  int alphabet_size() const { return s_; }
  double q() const { return q_; }
  const std::vector<StarPattern>& patterns() const { return patterns_; }
  bool is_exact() const { return !exact_.empty(); }
  const std::vector<Rational>& exact_probabilities() const { return exact_; }
  bool starred(int j) const { return starred_[static_cast<std::size_t>(j)]; }

  /// Distribution over Sigma^m codes obtained by filling each star from
  /// mu|_j; equals mu.
  std::vector<double> compose(const Predicate& P) const;
  std::vector<Rational> compose_exact(const Predicate& P) const;
  /// Pr[rho_j = a | rho_j != *] for each symbol a.
  std::vector<double> conditional_marginal(int j) const;
  std::vector<Rational> exact_conditional_marginal(int j) const;

 private:
  friend StarLaw star_law(const Predicate&, StarMode, std::optional<Rational>);
  int m_ = 0;
  int s_ = 2;
  double q_ = 0.0;
  std::vector<StarPattern> patterns_;
  std::vector<Rational> exact_;
  std::vector<bool> starred_;
};

/// Stars go on flexible coordinates with probability q each (default
/// min_weight / m). MonotoneNand requires a monotone binary P with every e_j
/// in P and uses the zero vector as the witness for every coordinate.
StarLaw star_law(const Predicate& P, StarMode mode = StarMode::General, std::optional<Rational> q = {});

/// Text format: "pred m=<m> sigma=<s>" then "w=<symbols> p=<weight>" lines,
/// or a header "pred builtin=<name> ..." (nand m=, nand2 p=, nand_graph,
/// parity m= b=, nae m=, eq m=, one_in_three, full m= sigma=).
Predicate read_predicate(std::istream& in);
void write_predicate(std::ostream& out, const Predicate& P);
Predicate load_predicate(const std::string& path);

std::string format_point(std::span<const Symbol> w, int s);

}  // namespace genpoly
