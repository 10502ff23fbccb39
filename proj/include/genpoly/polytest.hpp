#pragma once

// Exact and Monte Carlo measurement of how often m functions applied to the
// rows of a random P-column matrix leave P, plus the joint-value oracles used
// to check the counting and hitting lemmas.
//
// Inputs x^(1..m) in Sigma^n are coupled column by column: column i is
// (x^(1)_i, ..., x^(m)_i) ~ mu, independently over i.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "genpoly/funcspace.hpp"
#include "genpoly/predicates.hpp"

namespace genpoly {

inline constexpr Index kDefaultViolationCap = Index{1} << 24;
/// Two-sided 95% normal quantile.
inline constexpr double kWilsonZ = 1.959963984540054;

enum class ViolationMethod { Exhaustive, MonteCarlo };

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
  double half_width() const { return (upper - lower) / 2; }
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);

struct ViolationReport {
  double probability = 0.0;
  ViolationMethod method = ViolationMethod::Exhaustive;
  std::uint64_t samples = 0;
  WilsonInterval interval;  // Monte Carlo only
  /// m inputs whose columns lie in P but whose outputs do not.
  std::optional<std::vector<Point>> counterexample;
};

enum class Engine {
  Auto,
  /// Enumerates the |P|^n column tuples directly.
  Odometer,
  /// Contracts the last function against mu one coordinate at a time, then
  /// enumerates the remaining (Sigma^(m-1))^n row prefixes.
  Contraction,
};

/// Work estimates for the two exhaustive engines.
Index odometer_cost(const Predicate& P, int n);
Index contraction_cost(const Predicate& P, int n);

/// Joint output law: entry c is Pr[(f_1(x^1), ..., f_m(x^m)) has code c],
/// codes mixed-radix over Sigma^m.
std::vector<double> output_distribution(const Predicate& P, std::span<const FunctionTable> fs,
                                        Engine engine = Engine::Auto, Index cap = kDefaultViolationCap);

ViolationReport violation_exact(const Predicate& P, std::span<const FunctionTable> fs,
                                Engine engine = Engine::Auto, Index cap = kDefaultViolationCap);

using Evaluator = std::function<int(std::span<const Symbol>)>;

ViolationReport violation_mc(const Predicate& P, std::span<const FunctionTable> fs, std::uint64_t samples,
                             std::uint64_t seed);
/// Same estimator for functions given only as evaluators on Sigma^n.
ViolationReport violation_mc(const Predicate& P, std::span<const Evaluator> fs, int n, std::uint64_t samples,
                             std::uint64_t seed);

struct PolymorphismCheck {
  bool holds = true;
  std::optional<std::vector<Point>> counterexample;
};

PolymorphismCheck is_generalized_polymorphism(const Predicate& P, std::span<const FunctionTable> fs,
                                              Index cap = kDefaultViolationCap);

/// True when the points lie columnwise in P and the outputs do not.
bool is_counterexample(const Predicate& P, std::span<const FunctionTable> fs, std::span<const Point> xs);

/// Coloring value for a coordinate whose expectation is strictly between the thresholds.
inline constexpr int kColorStar = -1;
/// chi_eps(j) = 0 if E[phi_j] <= eps, 1 if E[phi_j] >= 1 - eps, else kColorStar.
std::vector<int> chi_coloring(std::span<const double> expectations, double eps);
std::vector<int> chi_coloring(std::span<const FunctionTable> phis, std::span<const ProductMeasure> measures,
                              double eps);

/// Pr[(phi_1(x^1), ..., phi_m(x^m)) = alpha] under mu^n.
double joint_value_probability(const Predicate& P, std::span<const FunctionTable> phis, std::span<const Symbol> alpha,
                               Index cap = kDefaultViolationCap);

/// One star-law pattern index per coordinate of [n].
using Restriction = std::vector<int>;

Restriction sample_restriction(const StarLaw& law, int n, std::uint64_t seed);
/// phi_j's view of rho: base symbol where the pattern does not star j, * where it does.
PartialAssignment restriction_view(const StarLaw& law, std::span<const int> rho, int j);

/// Pr[(phi_j(x^j))_j = alpha | rho], completing each star from mu|_j.
/// Uses the independence of the per-function events (stars are disjoint).
double joint_value_probability(const Predicate& P, const StarLaw& law, std::span<const int> rho,
                               std::span<const FunctionTable> phis, std::span<const Symbol> alpha);
/// The same quantity by enumerating every joint completion of the stars.
double joint_value_probability_brute(const Predicate& P, const StarLaw& law, std::span<const int> rho,
                                     std::span<const FunctionTable> phis, std::span<const Symbol> alpha,
                                     Index cap = kDefaultViolationCap);

/// E[prod_j f_j(x^j)] for numeric tables under mu^n.
double joint_expectation(const Predicate& P, std::span<const FunctionTable> fs, Index cap = kDefaultViolationCap);

struct SurvivalEstimate {
  double probability = 0.0;
  std::uint64_t samples = 0;
  WilsonInterval interval;
};

/// Pr_rho[E[f|_rho] >= delta], each coordinate starred with probability q and
/// otherwise drawn from nu; Monte Carlo over rho, exact inner expectations.
SurvivalEstimate survival_probability(const FunctionTable& f, double q, const ProductMeasure& nu, double delta,
                                      std::uint64_t samples, std::uint64_t seed);
/// Exhaustive over all (s+1)^n restrictions.
double survival_probability_exact(const FunctionTable& f, double q, const ProductMeasure& nu, double delta,
                                  Index cap = kDefaultViolationCap);

}  // namespace genpoly
