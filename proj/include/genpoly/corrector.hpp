#pragma once

// Correction pipelines: turn an approximate generalized polymorphism
// (f_1, ..., f_m) of P into an exact one (g_1, ..., g_m) close to it, plus the
// decoders and lemmas they rely on (character decoding, affine peeling,
// agreement on product chains, the fractional intersecting-family lift).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genpoly/funcspace.hpp"
#include "genpoly/polytest.hpp"
#include "genpoly/predicates.hpp"
#include "genpoly/regularity.hpp"

namespace genpoly {

enum class CellDecision { Kept, Zeroed, Fixed0, Fixed1, Rounded, One };
std::string_view to_string(CellDecision d);

/// How a function's output was produced.
enum class OutputRole {
  CellRule,   // per-cell decisions over J
  Copied,     // g_j = f_j (coordinates constant 0 in a monotone P)
  Character,  // decoded character of an inactive coordinate
  Constant,   // constant coordinate of P
  ClassCopy,  // g_j = g_rep, negated when the relation says so
};
std::string_view to_string(OutputRole r);

struct ExactnessCheck {
  bool exact = false;
  /// Coordinates the check ran on (all of [n], or the union of the outputs'
  /// relevant coordinates when the full check is over the cap).
  std::vector<int> coordinates;
  std::optional<std::vector<Point>> counterexample;
};

/// Decides whether gs is a generalized polymorphism of P. Functions that
/// depend only on a set K are checked over P^K when P^n is over the cap.
ExactnessCheck verify_exactness(const Predicate& P, std::span<const FunctionTable> gs,
                                Index cap = kDefaultViolationCap);

/// Coordinates g actually depends on.
std::vector<int> relevant_coordinates(const FunctionTable& g);

struct CorrectionParams {
  double eps = 0.1;
  /// Rounding threshold; defaults to eps/2 (alphabet: min(eps/2, 1/|Sigma|)).
  std::optional<double> eta;
  int d = 2;
  double tau = 0.05;
  int attempts = 64;
  std::uint64_t seed = 1;
  /// Star probability of the restriction law; default min weight / m.
  std::optional<Rational> q;
  /// Largest per-function distance (fractional: loss) an accepted run may have;
  /// defaults to eps.
  std::optional<double> budget;
  /// Characters with at least this many coordinates outside J stay out of J.
  int large_character = 6;
  Index cell_cap = kDefaultRegularityCellCap;
  Index verify_cap = kDefaultViolationCap;
};

struct AttemptRecord {
  std::uint64_t seed = 0;
  bool exact = false;
  bool characters_preserved = true;
  double total_distance = 0.0;
};

struct CorrectionResult {
  std::string pipeline;
  bool accepted = false;
  bool exact = false;
  ExactnessCheck check;
  std::vector<FunctionTable> gs;
  /// Pr_{mu|_j}[g_j != f_j]; the fractional pipeline reports E[(1 - g_j) f_j].
  std::vector<double> distances;
  double budget = 0.0;
  std::vector<int> J;
  double eta = 0.0;
  std::vector<OutputRole> roles;
  /// decisions[j][cell index over J] for CellRule outputs.
  std::vector<std::vector<CellDecision>> decisions;
  /// Pattern index of the chosen star-law restriction per coordinate outside J.
  std::optional<Restriction> restriction;
  std::optional<StarLaw> law;
  std::optional<RegularityCertificate> certificate;
  std::vector<AttemptRecord> attempts;
  std::vector<std::string> notes;

  void write(std::ostream& out) const;
};

/// P monotone (down-closed) with positive weights.
CorrectionResult correct_monotone(const Predicate& P, std::span<const FunctionTable> fs,
                                  const CorrectionParams& params = {});

struct RoundedCells {
  std::vector<FunctionTable> gs;
  std::vector<std::vector<CellDecision>> decisions;
};

/// g^{rho,eta}: each cell J <- x of f_j becomes 0 (restricted expectation
/// <= eta), 1 (>= 1 - eta) or stays f_j|cell. rho holds one star-law pattern
/// index per coordinate outside J; completion of stars uses mu|_j.
RoundedCells round_general_cells(const Predicate& P, const StarLaw& law, std::span<const FunctionTable> fs,
                                 std::span<const int> J, std::span<const int> rho, double eta);

/// Binary P; short relations, peeling, junta, rounding with restriction search.
CorrectionResult correct_general(const Predicate& P, std::span<const FunctionTable> fs,
                                 const CorrectionParams& params = {});

/// Round each cell's outputs: symbols whose restricted probability is below
/// eta become the most likely symbol.
RoundedCells round_alphabet_cells(const Predicate& P, const StarLaw& law, std::span<const FunctionTable> fs,
                                  std::span<const int> J, std::span<const int> rho, double eta);

/// Every coordinate of P must be flexible.
CorrectionResult correct_alphabet(const Predicate& P, std::span<const FunctionTable> fs,
                                  const CorrectionParams& params = {});

/// f1, f2 : {0,1}^n -> [0,1]; P = {00, 10, 01} weighted (1-2p, p, p).
CorrectionResult correct_fractional_nand(const FunctionTable& f1, const FunctionTable& f2, double p,
                                         const CorrectionParams& params = {});

struct CharacterFit {
  Character chi;
  double distance = 0.0;
  /// Largest |fhat(S)| (uniform decoding only).
  double max_coefficient = 0.0;
};

/// Uniform-measure decoding through the +-1 Walsh-Hadamard transform; ties on
/// |fhat| go to the lexicographically smallest support.
CharacterFit blr_decode_uniform(const FunctionTable& f);

/// Exact minimizer of Pr_nu[f != chi_{S,b}] over all (S, b); ties within 1e-12
/// go to the smallest support, then b = 0.
CharacterFit nearest_character(const FunctionTable& f, const ProductMeasure& nu);

struct PeelStep {
  AffineRelation relation;
  int deactivated = -1;
};

struct PeelResult {
  /// Coordinates never involved in a peeled relation.
  std::vector<int> F;
  /// Coordinates still active at the end.
  std::vector<int> I;
  /// Decoded character per coordinate (empty for F).
  std::vector<std::optional<CharacterFit>> characters;
  std::vector<PeelStep> steps;
  /// Coordinates that received two different characters.
  std::vector<int> conflicts;
  /// Every member of P|_I has exactly one extension in P.
  bool unique_extension = true;
};

/// P must have no affine relation of size below 3.
PeelResult peel_affine_relations(const Predicate& P, std::span<const FunctionTable> fs);

/// A square matrix stored row-major.
struct Matrix {
  int size = 0;
  std::vector<double> entries;
  double operator()(int r, int c) const { return entries[static_cast<std::size_t>(r * size + c)]; }
};

/// Second largest eigenvalue of a symmetric bistochastic matrix.
double second_eigenvalue(const Matrix& M);
/// All eigenvalues, descending.
std::vector<double> eigenvalues(const Matrix& M);

class TransitionChain {
 public:
  /// Factors must be symmetric, bistochastic and strictly positive; psi maps
  /// each coordinate to a factor index.
  TransitionChain(std::vector<Matrix> factors, std::vector<int> psi);

  int alphabet_size() const { return factors_[0].size; }
  int n() const { return static_cast<int>(psi_.size()); }
  const std::vector<Matrix>& factors() const { return factors_; }
  const std::vector<int>& psi() const { return psi_; }

  /// Second largest eigenvalue of the product chain M_psi.
  double second_eigenvalue() const;
  /// Largest |non-top eigenvalue| over the factors in use; bounds |lambda|
  /// for every psi over the same factors.
  double factor_bound() const;

 private:
  std::vector<Matrix> factors_;
  std::vector<int> psi_;
};

struct AgreementReport {
  int sigma = 0;
  /// Pr_{(x,y) ~ M_psi}[f(x) != f(y)]
  double disagreement = 0.0;
  double lambda = 0.0;
  double factor_bound = 0.0;
  /// disagreement / (1 - lambda)
  double bound = 0.0;
  /// Pr_{x ~ mu_psi}[f(x) != sigma]
  double mismatch = 0.0;
  bool holds = true;
};

/// Exact agreement statistics; f is a table over Y^n (alphabet |Y|).
AgreementReport markov_agreement(const TransitionChain& chain, const FunctionTable& f);

/// f(x) = fraction of the k-subsets of x lying in the family (0 when |x| < k).
/// Family members are subset masks over [n].
FunctionTable friedgut_regev_lift(std::span<const std::uint64_t> family, int n, int k);

// Text formats.
//   chain y=<|Y|> factors=<t>
//   factor <k>            followed by |Y| rows of |Y| entries
//   psi <k_1> ... <k_n>   (1-based factor indices)
TransitionChain read_chain(std::istream& in);
TransitionChain load_chain(const std::string& path);
//   family n=<n> k=<k>
//   <i_1>,...,<i_k>       one member per line, 1-based
struct Family {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> members;
};
Family read_family(std::istream& in);
Family load_family(const std::string& path);

}  // namespace genpoly
