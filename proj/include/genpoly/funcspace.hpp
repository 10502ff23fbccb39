#pragma once

// Dense function tables on finite product domains Sigma^n, product measures,
// partial assignments and the cell (subcube) enumeration used by every
// pipeline.
//
// Coordinates are 0-based in the API and 1-based in text formats.
// Inputs are encoded mixed-radix with coordinate 0 least significant:
//   index(x) = sum_i x_i * s^i.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genpoly {

using Symbol = std::uint8_t;
using Point = std::vector<Symbol>;
using Index = std::size_t;

/// Desk-scale caps: exhaustive oracles stay interactive below these.
inline constexpr int kMaxBinaryArity = 20;
inline constexpr Index kMaxTableSize = Index{1} << 22;
inline constexpr int kMaxAlphabet = 255;

enum class Codomain { Bit, Symbol, Real };

std::string_view to_string(Codomain c);
Codomain parse_codomain(std::string_view text);

/// s^n, throwing ResourceError when it exceeds `cap`.
Index checked_power(int s, int n, Index cap);

Index encode(std::span<const Symbol> x, int s);
Point decode(Index index, int n, int s);

/// Full-support distribution on {0, ..., s-1}.
class Measure {
 public:
  explicit Measure(std::vector<double> probs);
  static Measure uniform(int s);
  static Measure bernoulli(double p);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int a) const { return probs_[static_cast<std::size_t>(a)]; }
  std::span<const double> probs() const { return probs_; }
  double min() const;

  bool operator==(const Measure&) const = default;

 private:
  std::vector<double> probs_;
};

/// Independent per-coordinate measures on Sigma^n (common alphabet size).
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<Measure> coords, int alphabet_size = 0);
  static ProductMeasure iid(int n, const Measure& m);
  static ProductMeasure uniform(int n, int s);
  static ProductMeasure biased(std::span<const double> p);
  static ProductMeasure biased(int n, double p);

  int n() const { return static_cast<int>(coords_.size()); }
  int alphabet_size() const { return s_; }
  const Measure& operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const Measure> coordinates() const { return coords_; }

  ProductMeasure select(std::span<const int> coords) const;
  double weight(std::span<const Symbol> x) const;
  /// Dense weight table over Sigma^n in index order.
  std::vector<double> table() const;

 private:
  std::vector<Measure> coords_;
  int s_;
};

/// An element of (Sigma ∪ {*})^n.
class PartialAssignment {
 public:
  static constexpr int kStar = -1;

  explicit PartialAssignment(std::vector<int> entries);
  static PartialAssignment all_free(int n);
  /// Fixes the coordinates in `coords` to `values`, leaving the rest free.
  static PartialAssignment fixing(int n, std::span<const int> coords,
                                  std::span<const Symbol> values);

  int n() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  bool is_free(int i) const { return (*this)[i] == kStar; }
  const std::vector<int>& free_set() const { return free_; }
  const std::vector<int>& entries() const { return entries_; }

  /// Fills this assignment's free coordinates (in increasing order) with the
  /// entries of `inner`, which is an assignment over the free set.
  PartialAssignment compose(const PartialAssignment& inner) const;

 private:
  std::vector<int> entries_;
  std::vector<int> free_;
};

/// A total function Sigma^n -> codomain stored as a dense table.
///
/// Bit and Symbol values are stored as small integers in doubles so that the
/// transforms, restrictions and distances share one code path. Use
/// pack_bits() for the compact 1-bit-per-entry form of Boolean tables.
class FunctionTable {
 public:
  FunctionTable(int n, int s, Codomain codomain, std::vector<double> values);

  int n() const { return n_; }
  int alphabet_size() const { return s_; }
  Codomain codomain() const { return codomain_; }
  /// Number of output symbols (2 for Bit, s for Symbol, 0 for Real).
  int output_size() const;
  bool is_discrete() const { return codomain_ != Codomain::Real; }
  Index size() const { return values_.size(); }

  double operator[](Index index) const { return values_[index]; }
  int symbol(Index index) const { return static_cast<int>(values_[index]); }
  std::span<const double> values() const { return values_; }

  Index encode(std::span<const Symbol> x) const;
  double eval(std::span<const Symbol> x) const;

  /// Same shape and codomain, new values (validated).
  FunctionTable with_values(std::vector<double> values) const;
  /// Same values reinterpreted as a unit-interval real function.
  FunctionTable as_real() const;

  bool operator==(const FunctionTable&) const = default;

 private:
  int n_;
  int s_;
  Codomain codomain_;
  std::vector<double> values_;
};

/// chi_{S,b}(x) = b xor (xor_{i in S} x_i) on {0,1}^n; S stored as a bit mask.
struct Character {
  std::uint64_t support = 0;
  int offset = 0;

  int eval(std::span<const Symbol> x) const;
  int eval_index(Index x) const;
  std::vector<int> support_list() const;
  FunctionTable table(int n) const;

  bool operator==(const Character&) const = default;
};

/// "1,3,4" (1-based) for a support mask.
std::string format_support(std::uint64_t mask);
/// Lexicographic order on sorted element lists, with prefixes first.
bool support_less(std::uint64_t a, std::uint64_t b);

namespace make {
FunctionTable constant(int n, int s, Codomain codomain, double value);
FunctionTable dictator(int n, int i, int s = 2);
FunctionTable character(int n, std::span<const int> support, int offset);
FunctionTable character(int n, const Character& chi);
FunctionTable junta(int n, std::span<const int> coords, std::span<const double> table,
                    int s = 2, Codomain codomain = Codomain::Bit);
FunctionTable and_all(int n);
FunctionTable or_all(int n);
FunctionTable majority(int n);
/// x1 AND x2 when the Hamming weight is at most 0.6n, x1 OR x2 otherwise.
FunctionTable hybrid(int n);
int hybrid_value(std::span<const Symbol> x);
}  // namespace make

/// Builds a table from one symbolic constructor line, e.g. "char S=1,2 b=0",
/// "dictator i=3", "junta J=2 table=0,1", "hybrid", "and", "or",
/// "majority", "const 1".
FunctionTable make_function(int n, int s, Codomain codomain, std::string_view spec);

/// Restriction: the result is defined over the free coordinates of `a`, in
/// increasing original order.
FunctionTable restrict(const FunctionTable& f, const PartialAssignment& a);

/// Pr_nu[f != g]; for Real codomains E_nu|f - g|.
double distance(const FunctionTable& f, const FunctionTable& g, const ProductMeasure& nu);

/// E_nu[f].
double expectation(const FunctionTable& f, const ProductMeasure& nu);

/// One subcube of the split of f along coordinate set J.
struct Cell {
  Point assignment;          // values on J, in increasing coordinate order
  Index index = 0;           // mixed-radix index of `assignment`
  double weight = 0.0;       // nu_J(assignment)
  FunctionTable subfunction; // f restricted to J <- assignment
};

inline constexpr Index kDefaultCellCap = Index{1} << 20;

/// Streams the cells of f along J (sorted, distinct coordinates) with
/// weights from `nu_J`, a product measure over |J| coordinates.
void for_each_cell(const FunctionTable& f, std::span<const int> J, const ProductMeasure& nu_J,
                   const std::function<void(const Cell&)>& visit, Index cap = kDefaultCellCap);
std::vector<Cell> enumerate_cells(const FunctionTable& f, std::span<const int> J,
                                  const ProductMeasure& nu_J, Index cap = kDefaultCellCap);

/// Reassembles a function from per-cell subfunctions (inverse of the split).
FunctionTable assemble_cells(int n, std::span<const int> J, std::span<const FunctionTable> cells);

/// Complement of J in [n], increasing.
std::vector<int> complement(int n, std::span<const int> J);

std::vector<std::uint64_t> pack_bits(const FunctionTable& f);
FunctionTable unpack_bits(int n, std::span<const std::uint64_t> words);

// Text format:
//   fn n=<n> sigma=<s> codomain=<bit|sym|real>
//   table <entries...>            (index order, may continue on later lines)
// or a single constructor line (see make_function).
FunctionTable read_function(std::istream& in);
void write_function(std::ostream& out, const FunctionTable& f);
FunctionTable load_function(const std::string& path);
void save_function(const std::string& path, const FunctionTable& f);

}  // namespace genpoly
