#include "genpoly/funcspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "genpoly/errors.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

constexpr double kNormTolerance = 1e-12;

void check_alphabet(int s) {
  if (s < 2 || s > kMaxAlphabet) {
    throw ValidationError("alphabet size must be in [2, 255], got " + std::to_string(s));
  }
}

}  // namespace

std::string_view to_string(Codomain c) {
  switch (c) {
    case Codomain::Bit: return "bit";
    case Codomain::Symbol: return "sym";
    case Codomain::Real: return "real";
  }
  return "?";
}

Codomain parse_codomain(std::string_view text) {
  if (text == "bit") return Codomain::Bit;
  if (text == "sym") return Codomain::Symbol;
  if (text == "real") return Codomain::Real;
  throw ParseError("unknown codomain '" + std::string(text) + "'");
}

Index checked_power(int s, int n, Index cap) {
  if (n < 0) throw DomainError("negative exponent");
  Index r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > cap / static_cast<Index>(s)) {
      throw ResourceError(std::to_string(s) + "^" + std::to_string(n) + " exceeds the cap of " +
                          std::to_string(cap));
    }
    r *= static_cast<Index>(s);
  }
  if (r > cap) {
    throw ResourceError(std::to_string(s) + "^" + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(cap));
  }
  return r;
}

Index encode(std::span<const Symbol> x, int s) {
  Index idx = 0;
  for (std::size_t i = x.size(); i-- > 0;) idx = idx * static_cast<Index>(s) + x[i];
  return idx;
}

Point decode(Index index, int n, int s) {
  Point x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = static_cast<Symbol>(index % static_cast<Index>(s));
    index /= static_cast<Index>(s);
  }
  return x;
}

// ---------------------------------------------------------------- Measure

Measure::Measure(std::vector<double> probs) : probs_(std::move(probs)) {
  check_alphabet(static_cast<int>(probs_.size()));
  double total = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0)) throw ValidationError("measure must have full support");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("measure not normalized: total " + text::format_double(total));
  }
}

Measure Measure::uniform(int s) {
  check_alphabet(s);
  return Measure(std::vector<double>(static_cast<std::size_t>(s), 1.0 / s));
}

Measure Measure::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("bias must lie strictly between 0 and 1, got " + text::format_double(p));
  }
  return Measure({1.0 - p, p});
}

double Measure::min() const { return *std::min_element(probs_.begin(), probs_.end()); }

// --------------------------------------------------------- ProductMeasure

ProductMeasure::ProductMeasure(std::vector<Measure> coords, int alphabet_size)
    : coords_(std::move(coords)), s_(alphabet_size) {
  if (!coords_.empty()) {
    if (s_ == 0) s_ = coords_.front().size();
    for (const auto& m : coords_) {
      if (m.size() != s_) throw ValidationError("product measure coordinates disagree on alphabet size");
    }
  }
  if (s_ == 0) s_ = 2;
  check_alphabet(s_);
}

ProductMeasure ProductMeasure::iid(int n, const Measure& m) {
  return ProductMeasure(std::vector<Measure>(static_cast<std::size_t>(n), m), m.size());
}

ProductMeasure ProductMeasure::uniform(int n, int s) { return iid(n, Measure::uniform(s)); }

ProductMeasure ProductMeasure::biased(std::span<const double> p) {
  std::vector<Measure> coords;
  coords.reserve(p.size());
  for (double pi : p) coords.push_back(Measure::bernoulli(pi));
  return ProductMeasure(std::move(coords), 2);
}

ProductMeasure ProductMeasure::biased(int n, double p) { return iid(n, Measure::bernoulli(p)); }

ProductMeasure ProductMeasure::select(std::span<const int> coords) const {
  std::vector<Measure> out;
  out.reserve(coords.size());
  for (int i : coords) {
    if (i < 0 || i >= n()) throw DomainError("coordinate out of range in ProductMeasure::select");
    out.push_back(coords_[static_cast<std::size_t>(i)]);
  }
  return ProductMeasure(std::move(out), s_);
}

double ProductMeasure::weight(std::span<const Symbol> x) const {
  if (static_cast<int>(x.size()) != n()) throw DomainError("point has wrong length");
  double w = 1.0;
  for (int i = 0; i < n(); ++i) {
    if (x[static_cast<std::size_t>(i)] >= s_) throw DomainError("symbol outside alphabet");
    w *= coords_[static_cast<std::size_t>(i)][x[static_cast<std::size_t>(i)]];
  }
  return w;
}

std::vector<double> ProductMeasure::table() const {
  Index size = checked_power(s_, n(), kMaxTableSize);
  std::vector<double> w(size);
  w[0] = 1.0;
  Index block = 1;
  // Coordinate i occupies stride s^i; grow the table one coordinate at a time.
  for (int i = 0; i < n(); ++i) {
    const auto& m = coords_[static_cast<std::size_t>(i)];
    for (int a = s_ - 1; a >= 0; --a) {
      for (Index k = 0; k < block; ++k) w[static_cast<Index>(a) * block + k] = w[k] * m[a];
    }
    block *= static_cast<Index>(s_);
  }
  return w;
}

// ------------------------------------------------------ PartialAssignment

PartialAssignment::PartialAssignment(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int i = 0; i < n(); ++i) {
    int e = entries_[static_cast<std::size_t>(i)];
    if (e == kStar) {
      free_.push_back(i);
    } else if (e < 0) {
      throw DomainError("partial assignment entry must be a symbol or *");
    }
  }
}

PartialAssignment PartialAssignment::all_free(int n) {
  return PartialAssignment(std::vector<int>(static_cast<std::size_t>(n), kStar));
}

PartialAssignment PartialAssignment::fixing(int n, std::span<const int> coords,
                                            std::span<const Symbol> values) {
  if (coords.size() != values.size()) throw DomainError("fixing: coordinate/value count mismatch");
  std::vector<int> e(static_cast<std::size_t>(n), kStar);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (coords[k] < 0 || coords[k] >= n) throw DomainError("fixing: coordinate out of range");
    e[static_cast<std::size_t>(coords[k])] = values[k];
  }
  return PartialAssignment(std::move(e));
}

PartialAssignment PartialAssignment::compose(const PartialAssignment& inner) const {
  if (inner.n() != static_cast<int>(free_.size())) {
    throw DomainError("compose: inner assignment must cover exactly the free coordinates");
  }
  std::vector<int> e = entries_;
  for (std::size_t k = 0; k < free_.size(); ++k) {
    e[static_cast<std::size_t>(free_[k])] = inner[static_cast<int>(k)];
  }
  return PartialAssignment(std::move(e));
}

// ---------------------------------------------------------- FunctionTable

FunctionTable::FunctionTable(int n, int s, Codomain codomain, std::vector<double> values)
    : n_(n), s_(s), codomain_(codomain), values_(std::move(values)) {
  check_alphabet(s);
  if (n < 0) throw ValidationError("negative coordinate count");
  Index expected = checked_power(s, n, kMaxTableSize);
  if (values_.size() != expected) {
    throw ValidationError("table has " + std::to_string(values_.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  for (double v : values_) {
    switch (codomain_) {
      case Codomain::Bit:
        if (v != 0.0 && v != 1.0) throw ValidationError("bit table entry outside {0,1}");
        break;
      case Codomain::Symbol:
        if (v < 0.0 || v >= s || v != std::floor(v)) throw ValidationError("symbol table entry outside alphabet");
        break;
      case Codomain::Real:
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("real table entry outside [0,1]");
        break;
    }
  }
}

int FunctionTable::output_size() const {
  switch (codomain_) {
    case Codomain::Bit: return 2;
    case Codomain::Symbol: return s_;
    case Codomain::Real: return 0;
  }
  return 0;
}

Index FunctionTable::encode(std::span<const Symbol> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw DomainError("point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(n_));
  }
  for (Symbol a : x) {
    if (a >= s_) throw DomainError("coordinate value " + std::to_string(a) + " outside alphabet");
  }
  return genpoly::encode(x, s_);
}

double FunctionTable::eval(std::span<const Symbol> x) const { return values_[encode(x)]; }

FunctionTable FunctionTable::with_values(std::vector<double> values) const {
  return FunctionTable(n_, s_, codomain_, std::move(values));
}

FunctionTable FunctionTable::as_real() const {
  if (codomain_ == Codomain::Symbol) throw UnsupportedError("symbol tables have no real interpretation");
  return FunctionTable(n_, s_, Codomain::Real, values_);
}

// -------------------------------------------------------------- Character

int Character::eval(std::span<const Symbol> x) const {
  int v = offset;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((support >> i) & 1U) v ^= x[i] & 1;
  }
  return v;
}

int Character::eval_index(Index x) const {
  return offset ^ (std::popcount(static_cast<std::uint64_t>(x) & support) & 1);
}

std::vector<int> Character::support_list() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i) {
    if ((support >> i) & 1U) out.push_back(i);
  }
  return out;
}

FunctionTable Character::table(int n) const { return make::character(n, *this); }

std::string format_support(std::uint64_t mask) {
  std::string out;
  for (int i = 0; i < 64; ++i) {
    if ((mask >> i) & 1U) {
      if (!out.empty()) out += ',';
      out += std::to_string(i + 1);
    }
  }
  return out;
}

bool support_less(std::uint64_t a, std::uint64_t b) {
  // Walk both sorted element lists in parallel.
  while (a != 0 && b != 0) {
    int ea = std::countr_zero(a);
    int eb = std::countr_zero(b);
    if (ea != eb) return ea < eb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

// ----------------------------------------------------------- constructors

namespace make {

namespace {

void check_coordinate(int n, int i) {
  if (i < 0 || i >= n) {
    throw DomainError("coordinate " + std::to_string(i + 1) + " outside [1," + std::to_string(n) + "]");
  }
}

void check_binary_n(int n) {
  if (n < 0 || n > kMaxBinaryArity) {
    throw ResourceError("binary arity must be at most " + std::to_string(kMaxBinaryArity));
  }
}

template <class F>
FunctionTable binary_table(int n, F&& value) {
  check_binary_n(n);
  std::vector<double> v(Index{1} << n);
  for (Index x = 0; x < v.size(); ++x) v[x] = value(x);
  return FunctionTable(n, 2, Codomain::Bit, std::move(v));
}

}  // namespace

FunctionTable constant(int n, int s, Codomain codomain, double value) {
  return FunctionTable(n, s, codomain, std::vector<double>(checked_power(s, n, kMaxTableSize), value));
}

FunctionTable dictator(int n, int i, int s) {
  check_coordinate(n, i);
  Index size = checked_power(s, n, kMaxTableSize);
  Index stride = checked_power(s, i, kMaxTableSize);
  std::vector<double> v(size);
  for (Index x = 0; x < size; ++x) v[x] = static_cast<double>((x / stride) % static_cast<Index>(s));
  return FunctionTable(n, s, s == 2 ? Codomain::Bit : Codomain::Symbol, std::move(v));
}

FunctionTable character(int n, std::span<const int> support, int offset) {
  Character chi{0, offset & 1};
  for (int i : support) {
    check_coordinate(n, i);
    chi.support |= std::uint64_t{1} << i;
  }
  return character(n, chi);
}

FunctionTable character(int n, const Character& chi) {
  if (n < 64 && (chi.support >> n) != 0) throw DomainError("character support outside [n]");
  return binary_table(n, [&](Index x) { return static_cast<double>(chi.eval_index(x)); });
}

FunctionTable junta(int n, std::span<const int> coords, std::span<const double> table, int s,
                    Codomain codomain) {
  Index expected = checked_power(s, static_cast<int>(coords.size()), kMaxTableSize);
  if (table.size() != expected) {
    throw ValidationError("junta table has " + std::to_string(table.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  for (int i : coords) check_coordinate(n, i);
  Index size = checked_power(s, n, kMaxTableSize);
  std::vector<Index> strides;
  for (int i : coords) strides.push_back(checked_power(s, i, kMaxTableSize));
  std::vector<double> v(size);
  for (Index x = 0; x < size; ++x) {
    Index j = 0;
    for (std::size_t k = coords.size(); k-- > 0;) {
      j = j * static_cast<Index>(s) + (x / strides[k]) % static_cast<Index>(s);
    }
    v[x] = table[j];
  }
  return FunctionTable(n, s, codomain, std::move(v));
}

FunctionTable and_all(int n) {
  Index full = (Index{1} << n) - 1;
  return binary_table(n, [&](Index x) { return x == full ? 1.0 : 0.0; });
}

FunctionTable or_all(int n) {
  return binary_table(n, [](Index x) { return x != 0 ? 1.0 : 0.0; });
}

FunctionTable majority(int n) {
  return binary_table(n, [n](Index x) { return 2 * std::popcount(static_cast<std::uint64_t>(x)) > n ? 1.0 : 0.0; });
}

int hybrid_value(std::span<const Symbol> x) {
  if (x.size() < 2) throw DomainError("hybrid function needs n >= 2");
  std::size_t weight = 0;
  for (Symbol a : x) weight += a;
  int x1 = x[0] & 1;
  int x2 = x[1] & 1;
  return 10 * weight <= 6 * x.size() ? (x1 & x2) : (x1 | x2);
}

FunctionTable hybrid(int n) {
  if (n < 2) throw DomainError("hybrid function needs n >= 2");
  return binary_table(n, [n](Index x) {
    auto weight = static_cast<Index>(std::popcount(static_cast<std::uint64_t>(x)));
    int x1 = static_cast<int>(x & 1U);
    int x2 = static_cast<int>((x >> 1) & 1U);
    return static_cast<double>(10 * weight <= 6 * static_cast<Index>(n) ? (x1 & x2) : (x1 | x2));
  });
}

}  // namespace make

FunctionTable make_function(int n, int s, Codomain codomain, std::string_view spec) {
  auto toks = text::tokens(spec);
  if (toks.empty()) throw ParseError("empty function constructor");
  auto kv = text::key_values(toks, 1);
  std::string_view kind = toks[0];
  auto require_binary = [&] {
    if (s != 2) throw ParseError("constructor '" + std::string(kind) + "' needs sigma=2");
  };
  if (kind == "const") {
    if (toks.size() != 2) throw ParseError("usage: const <value>");
    return make::constant(n, s, codomain, text::parse_double(toks[1]));
  }
  if (kind == "dictator") {
    auto i = text::parse_index_list(text::require(kv, "i", "dictator"));
    if (i.size() != 1) throw ParseError("dictator needs exactly one coordinate");
    auto f = make::dictator(n, i[0], s);
    return FunctionTable(n, s, codomain, std::vector<double>(f.values().begin(), f.values().end()));
  }
  if (kind == "char") {
    require_binary();
    auto S = text::parse_index_list(text::require(kv, "S", "char"));
    int b = kv.contains("b") ? static_cast<int>(text::parse_int(kv.at("b"))) : 0;
    return make::character(n, S, b);
  }
  if (kind == "junta") {
    auto J = text::parse_index_list(text::require(kv, "J", "junta"));
    std::vector<double> table;
    for (auto part : text::split(text::require(kv, "table", "junta"), ',')) {
      table.push_back(text::parse_double(part));
    }
    return make::junta(n, J, table, s, codomain);
  }
  if (kind == "hybrid") { require_binary(); return make::hybrid(n); }
  if (kind == "and") { require_binary(); return make::and_all(n); }
  if (kind == "or") { require_binary(); return make::or_all(n); }
  if (kind == "majority") { require_binary(); return make::majority(n); }
  throw ParseError("unknown function constructor '" + std::string(kind) + "'");
}

FunctionTable restrict(const FunctionTable& f, const PartialAssignment& a) {
  if (a.n() != f.n()) throw DomainError("restriction has wrong length");
  const int s = f.alphabet_size();
  Index base = 0;
  Index stride = 1;
  std::vector<Index> strides(static_cast<std::size_t>(f.n()));
  for (int i = 0; i < f.n(); ++i) {
    strides[static_cast<std::size_t>(i)] = stride;
    if (!a.is_free(i)) {
      if (a[i] >= s) throw DomainError("restriction value outside alphabet");
      base += static_cast<Index>(a[i]) * stride;
    }
    stride *= static_cast<Index>(s);
  }
  const auto& free = a.free_set();
  const int k = static_cast<int>(free.size());
  Index size = checked_power(s, k, kMaxTableSize);
  std::vector<double> out(size);
  std::vector<int> digit(static_cast<std::size_t>(k), 0);
  Index src = base;
  for (Index y = 0; y < size; ++y) {
    out[y] = f[src];
    // Odometer over the free coordinates.
    for (int c = 0; c < k; ++c) {
      auto& d = digit[static_cast<std::size_t>(c)];
      Index st = strides[static_cast<std::size_t>(free[static_cast<std::size_t>(c)])];
      if (++d < s) {
        src += st;
        break;
      }
      src -= st * static_cast<Index>(s - 1);
      d = 0;
    }
  }
  return FunctionTable(k, s, f.codomain(), std::move(out));
}

double distance(const FunctionTable& f, const FunctionTable& g, const ProductMeasure& nu) {
  if (f.n() != g.n() || f.alphabet_size() != g.alphabet_size() || nu.n() != f.n() ||
      nu.alphabet_size() != f.alphabet_size()) {
    throw DomainError("distance: functions and measure must share a domain");
  }
  auto w = nu.table();
  double total = 0.0;
  const bool real = f.codomain() == Codomain::Real || g.codomain() == Codomain::Real;
  for (Index x = 0; x < w.size(); ++x) {
    total += w[x] * (real ? std::abs(f[x] - g[x]) : (f[x] != g[x] ? 1.0 : 0.0));
  }
  return total;
}

double expectation(const FunctionTable& f, const ProductMeasure& nu) {
  if (nu.n() != f.n() || nu.alphabet_size() != f.alphabet_size()) {
    throw DomainError("expectation: measure and function must share a domain");
  }
  auto w = nu.table();
  double total = 0.0;
  for (Index x = 0; x < w.size(); ++x) total += w[x] * f[x];
  return total;
}

std::vector<int> complement(int n, std::span<const int> J) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (int i : J) {
    if (i < 0 || i >= n) throw DomainError("coordinate out of range");
    in[static_cast<std::size_t>(i)] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

void for_each_cell(const FunctionTable& f, std::span<const int> J, const ProductMeasure& nu_J,
                   const std::function<void(const Cell&)>& visit, Index cap) {
  const int s = f.alphabet_size();
  if (nu_J.n() != static_cast<int>(J.size()) || (nu_J.n() > 0 && nu_J.alphabet_size() != s)) {
    throw DomainError("cell measure must cover exactly the junta coordinates");
  }
  if (!std::is_sorted(J.begin(), J.end()) || std::adjacent_find(J.begin(), J.end()) != J.end()) {
    throw DomainError("junta coordinates must be sorted and distinct");
  }
  const Index cells = checked_power(s, static_cast<int>(J.size()), cap);
  std::vector<int> entries(static_cast<std::size_t>(f.n()), PartialAssignment::kStar);
  for (int i : J) {
    if (i < 0 || i >= f.n()) throw DomainError("junta coordinate out of range");
  }
  Cell cell{Point(J.size(), 0), 0, 0.0, FunctionTable(0, s, f.codomain(), {f[0]})};
  for (Index c = 0; c < cells; ++c) {
    cell.index = c;
    cell.assignment = decode(c, static_cast<int>(J.size()), s);
    for (std::size_t k = 0; k < J.size(); ++k) entries[static_cast<std::size_t>(J[k])] = cell.assignment[k];
    cell.weight = nu_J.weight(cell.assignment);
    cell.subfunction = restrict(f, PartialAssignment(entries));
    visit(cell);
  }
}

std::vector<Cell> enumerate_cells(const FunctionTable& f, std::span<const int> J,
                                  const ProductMeasure& nu_J, Index cap) {
  std::vector<Cell> out;
  for_each_cell(f, J, nu_J, [&](const Cell& c) { out.push_back(c); }, cap);
  return out;
}

FunctionTable assemble_cells(int n, std::span<const int> J, std::span<const FunctionTable> cells) {
  if (cells.empty()) throw DomainError("assemble_cells: no cells");
  const int s = cells.front().alphabet_size();
  const Codomain codomain = cells.front().codomain();
  if (cells.size() != checked_power(s, static_cast<int>(J.size()), kMaxTableSize)) {
    throw DomainError("assemble_cells: wrong number of cells");
  }
  auto free = complement(n, J);
  Index size = checked_power(s, n, kMaxTableSize);
  std::vector<Index> stride(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) stride[static_cast<std::size_t>(i)] = checked_power(s, i, kMaxTableSize);
  std::vector<double> v(size);
  for (Index x = 0; x < size; ++x) {
    Index c = 0;
    Index y = 0;
    for (std::size_t k = J.size(); k-- > 0;) {
      c = c * static_cast<Index>(s) + (x / stride[static_cast<std::size_t>(J[k])]) % static_cast<Index>(s);
    }
    for (std::size_t k = free.size(); k-- > 0;) {
      y = y * static_cast<Index>(s) + (x / stride[static_cast<std::size_t>(free[k])]) % static_cast<Index>(s);
    }
    const auto& cell = cells[c];
    if (cell.n() != static_cast<int>(free.size()) || cell.alphabet_size() != s) {
      throw DomainError("assemble_cells: cell has the wrong shape");
    }
    v[x] = cell[y];
  }
  return FunctionTable(n, s, codomain, std::move(v));
}

std::vector<std::uint64_t> pack_bits(const FunctionTable& f) {
  if (f.codomain() != Codomain::Bit) throw UnsupportedError("pack_bits needs a bit table");
  std::vector<std::uint64_t> words((f.size() + 63) / 64, 0);
  for (Index x = 0; x < f.size(); ++x) {
    if (f[x] != 0.0) words[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  return words;
}

FunctionTable unpack_bits(int n, std::span<const std::uint64_t> words) {
  Index size = checked_power(2, n, kMaxTableSize);
  if (words.size() != (size + 63) / 64) throw ValidationError("packed table has the wrong length");
  std::vector<double> v(size);
  for (Index x = 0; x < size; ++x) v[x] = static_cast<double>((words[x >> 6] >> (x & 63)) & 1U);
  return FunctionTable(n, 2, Codomain::Bit, std::move(v));
}

// ---------------------------------------------------------------- file I/O

FunctionTable read_function(std::istream& in) {
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  if (lines.empty()) throw ParseError("function file is empty");
  auto header = text::tokens(lines[0]);
  if (header.empty() || header[0] != "fn") throw ParseError("function file must start with 'fn'");
  auto kv = text::key_values(header, 1);
  int n = static_cast<int>(text::parse_int(text::require(kv, "n", "fn header")));
  int s = kv.contains("sigma") ? static_cast<int>(text::parse_int(kv.at("sigma"))) : 2;
  Codomain codomain = kv.contains("codomain") ? parse_codomain(kv.at("codomain"))
                                              : (s == 2 ? Codomain::Bit : Codomain::Symbol);
  if (lines.size() < 2) throw ParseError("function file has no body");
  auto first = text::tokens(lines[1]);
  if (!first.empty() && first[0] == "table") {
    std::vector<double> values;
    for (std::size_t k = 1; k < lines.size(); ++k) {
      auto toks = text::tokens(lines[k]);
      for (std::size_t t = (k == 1 ? 1 : 0); t < toks.size(); ++t) values.push_back(text::parse_double(toks[t]));
    }
    return FunctionTable(n, s, codomain, std::move(values));
  }
  if (lines.size() != 2) throw ParseError("a constructor body must be a single line");
  return make_function(n, s, codomain, lines[1]);
}

void write_function(std::ostream& out, const FunctionTable& f) {
  out << "fn n=" << f.n() << " sigma=" << f.alphabet_size() << " codomain=" << to_string(f.codomain()) << "\n";
  out << "table";
  for (Index x = 0; x < f.size(); ++x) {
    out << ((x > 0 && x % 32 == 0) ? "\n" : " ");
    if (f.is_discrete()) {
      out << f.symbol(x);
    } else {
      out << text::format_double(f[x]);
    }
  }
  out << "\n";
}

FunctionTable load_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open function file '" + path + "'");
  try {
    return read_function(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_function(const std::string& path, const FunctionTable& f) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write function file '" + path + "'");
  write_function(out, f);
}

}  // namespace genpoly
