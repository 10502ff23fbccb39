#include "genpoly/harmonics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>

#include "genpoly/errors.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

void check_shape(std::span<const double> values, const ProductMeasure& nu) {
  Index expected = checked_power(nu.alphabet_size(), nu.n(), kMaxTableSize);
  if (values.size() != expected) {
    throw DomainError("table has " + std::to_string(values.size()) + " entries but the measure expects " +
                      std::to_string(expected));
  }
}

void check_domain(const FunctionTable& f, const ProductMeasure& nu) {
  if (f.n() != nu.n() || (f.n() > 0 && f.alphabet_size() != nu.alphabet_size())) {
    throw DomainError("function and measure must share a domain");
  }
}

void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("noise rate must lie in (0, 1]");
}

void check_coordinate(int i, int n) {
  if (i < 0 || i >= n) throw DomainError("coordinate out of range");
}

/// ||f_S||^2 for every subset mask, from the basis coefficients.
std::vector<double> mask_norms(std::span<const double> values, const ProductMeasure& nu) {
  const int n = nu.n();
  const int s = nu.alphabet_size();
  auto c = basis_coefficients(values, nu);
  std::vector<double> norm2(Index{1} << n, 0.0);
  if (s == 2) {
    for (Index x = 0; x < c.size(); ++x) norm2[x] = c[x] * c[x];
    return norm2;
  }
  // Odometer over multi-indices, tracking the mask of nonzero digits.
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  Index mask = 0;
  for (Index x = 0; x < c.size(); ++x) {
    norm2[mask] += c[x] * c[x];
    for (int i = 0; i < n; ++i) {
      auto& d = digit[static_cast<std::size_t>(i)];
      if (++d < s) {
        mask |= Index{1} << i;
        break;
      }
      d = 0;
      mask &= ~(Index{1} << i);
    }
  }
  return norm2;
}

Spectrum fold(const std::vector<double>& norm2, int n) {
  Spectrum sp;
  sp.n = n;
  sp.level.assign(static_cast<std::size_t>(n) + 1, 0.0);
  sp.influence.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  for (Index mask = 0; mask < norm2.size(); ++mask) {
    double w = norm2[mask];
    if (w == 0.0) continue;
    auto k = static_cast<std::size_t>(std::popcount(mask));
    sp.level[k] += w;
    for (Index rest = mask; rest != 0; rest &= rest - 1) {
      sp.influence[static_cast<std::size_t>(std::countr_zero(rest))][k] += w;
    }
  }
  return sp;
}

}  // namespace

double Spectrum::total() const { return std::accumulate(level.begin(), level.end(), 0.0); }

double Spectrum::stability(double rho) const {
  double acc = 0.0;
  double r = 1.0;
  for (double w : level) {
    acc += r * w;
    r *= rho;
  }
  return acc;
}

double Spectrum::noisy_influence(int i, double rho) const {
  check_coordinate(i, n);
  double acc = 0.0;
  double r = 1.0;
  for (double w : influence[static_cast<std::size_t>(i)]) {
    acc += r * w;
    r *= rho;
  }
  return acc;
}

double Spectrum::low_degree_influence(int i, int d) const {
  check_coordinate(i, n);
  if (d < 0) throw DomainError("degree must be nonnegative");
  const auto& row = influence[static_cast<std::size_t>(i)];
  double acc = 0.0;
  for (int k = 0; k <= std::min(d, n); ++k) acc += row[static_cast<std::size_t>(k)];
  return acc;
}

double Spectrum::low_degree_mass(int d) const {
  double acc = 0.0;
  for (int k = 0; k <= std::min(d, n); ++k) acc += level[static_cast<std::size_t>(k)];
  return acc;
}

std::vector<std::vector<double>> coordinate_basis(const Measure& m) {
  const int s = m.size();
  std::vector<std::vector<double>> basis;
  basis.emplace_back(static_cast<std::size_t>(s), 1.0);
  auto inner = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (int a = 0; a < s; ++a) acc += m[a] * u[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
    return acc;
  };
  for (int k = 1; k < s; ++k) {
    std::vector<double> v(static_cast<std::size_t>(s), 0.0);
    v[static_cast<std::size_t>(k)] = 1.0;
    // Modified Gram-Schmidt; two passes keep the basis orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double c = inner(v, b);
        for (int a = 0; a < s; ++a) v[static_cast<std::size_t>(a)] -= c * b[static_cast<std::size_t>(a)];
      }
    }
    double norm = std::sqrt(inner(v, v));
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  if (s == 2) {
    // Closed form, so that the binary basis matches (x - p) / sqrt(p(1-p)) exactly.
    double p = m[1];
    double sigma = std::sqrt(p * (1.0 - p));
    basis[1] = {-p / sigma, (1.0 - p) / sigma};
  }
  return basis;
}

std::vector<double> basis_coefficients(std::span<const double> values, const ProductMeasure& nu) {
  check_shape(values, nu);
  const int n = nu.n();
  const int s = nu.alphabet_size();
  std::vector<double> c(values.begin(), values.end());
  std::vector<double> in(static_cast<std::size_t>(s));
  Index stride = 1;
  for (int i = 0; i < n; ++i) {
    const Measure& m = nu[i];
    auto basis = coordinate_basis(m);
    // w[k][a] = mu(a) phi_k(a)
    std::vector<double> w(static_cast<std::size_t>(s * s));
    for (int k = 0; k < s; ++k) {
      for (int a = 0; a < s; ++a) {
        w[static_cast<std::size_t>(k * s + a)] = m[a] * basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
      }
    }
    const Index block = stride * static_cast<Index>(s);
    if (s == 2) {
      const double p = m[1];
      const double sigma = std::sqrt(p * (1.0 - p));
      for (Index base = 0; base < c.size(); base += block) {
        for (Index j = base; j < base + stride; ++j) {
          double a = c[j];
          double b = c[j + stride];
          c[j] = (1.0 - p) * a + p * b;
          c[j + stride] = sigma * (b - a);
        }
      }
    } else {
      for (Index base = 0; base < c.size(); base += block) {
        for (Index j = base; j < base + stride; ++j) {
          for (int a = 0; a < s; ++a) in[static_cast<std::size_t>(a)] = c[j + static_cast<Index>(a) * stride];
          for (int k = 0; k < s; ++k) {
            double acc = 0.0;
            for (int a = 0; a < s; ++a) acc += w[static_cast<std::size_t>(k * s + a)] * in[static_cast<std::size_t>(a)];
            c[j + static_cast<Index>(k) * stride] = acc;
          }
        }
      }
    }
    stride = block;
  }
  return c;
}

Spectrum spectrum(std::span<const double> values, const ProductMeasure& nu) {
  return fold(mask_norms(values, nu), nu.n());
}

Spectrum spectrum(const FunctionTable& f, const ProductMeasure& nu) {
  check_domain(f, nu);
  return spectrum(f.values(), nu);
}

void Decomposition::write(std::ostream& out, double min_norm2) const {
  std::vector<std::uint64_t> masks;
  for (Index m = 0; m < norm2.size(); ++m) {
    if (norm2[m] >= min_norm2) masks.push_back(m);
  }
  std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return support_less(a, b);
  });
  for (auto m : masks) out << "S=" << format_support(m) << " norm2=" << text::format_double(norm2[m]) << "\n";
}

Decomposition fourier_expand(const FunctionTable& f, std::span<const double> p) {
  if (f.alphabet_size() != 2) throw DomainError("fourier_expand needs a binary domain");
  if (static_cast<int>(p.size()) != f.n()) throw DomainError("one bias per coordinate is required");
  auto nu = ProductMeasure::biased(p);
  Decomposition d{nu, f.n(), 2, {}, basis_coefficients(f.values(), nu), {}};
  d.norm2.resize(d.coefficients.size());
  for (Index x = 0; x < d.coefficients.size(); ++x) d.norm2[x] = d.coefficients[x] * d.coefficients[x];
  return d;
}

Decomposition efron_stein(const FunctionTable& f, const ProductMeasure& nu, bool materialize) {
  check_domain(f, nu);
  Decomposition d{nu, f.n(), f.alphabet_size(), mask_norms(f.values(), nu), {}, {}};
  if (!materialize) return d;
  const int n = f.n();
  if ((Index{1} << n) > kMaxComponentEntries / f.size()) {
    throw ResourceError("too many Efron-Stein component entries to materialize");
  }
  // Split along one coordinate at a time: g -> (E_i g, g - E_i g).
  std::vector<std::vector<double>> comps;
  comps.emplace_back(f.values().begin(), f.values().end());
  for (int i = 0; i < n; ++i) {
    const Index half = comps.size();
    comps.resize(2 * half);
    for (Index m = 0; m < half; ++m) {
      auto avg = average_out(comps[m], i, nu);
      auto& hi = comps[m + half];
      hi = std::move(comps[m]);
      for (Index x = 0; x < hi.size(); ++x) hi[x] -= avg[x];
      comps[m] = std::move(avg);
    }
  }
  d.components = std::move(comps);
  return d;
}

double low_degree_influence(const FunctionTable& f, int i, int d, const ProductMeasure& nu) {
  return spectrum(f, nu).low_degree_influence(i, d);
}

FunctionTable indicator(const FunctionTable& f, int sigma) {
  if (!f.is_discrete()) throw UnsupportedError("indicators need a discrete codomain");
  std::vector<double> v(f.size());
  for (Index x = 0; x < f.size(); ++x) v[x] = f.symbol(x) == sigma ? 1.0 : 0.0;
  return FunctionTable(f.n(), f.alphabet_size(), Codomain::Bit, std::move(v));
}

RegularityWitness is_regular(const FunctionTable& f, int d, double tau, const ProductMeasure& nu) {
  check_domain(f, nu);
  RegularityWitness w;
  auto scan = [&](std::span<const double> values, int symbol) {
    auto sp = spectrum(values, nu);
    for (int i = 0; i < f.n(); ++i) {
      double inf = sp.low_degree_influence(i, d);
      // Near-ties within rounding go to the earlier (coordinate, symbol).
      if (inf > w.max_influence + 1e-12 || (w.coordinate < 0 && inf > 0.0)) {
        w.max_influence = inf;
        w.coordinate = i;
        w.symbol = symbol;
      }
    }
  };
  if (f.codomain() == Codomain::Symbol) {
    for (int sigma = 0; sigma < f.output_size(); ++sigma) scan(indicator(f, sigma).values(), sigma);
  } else {
    scan(f.values(), -1);
  }
  w.regular = w.max_influence <= tau;
  return w;
}

double noise_stability(const FunctionTable& f, double rho, const ProductMeasure& nu) {
  check_rho(rho);
  return spectrum(f, nu).stability(rho);
}

double noise_stability_direct(std::span<const double> values, double rho, const ProductMeasure& nu) {
  check_rho(rho);
  check_shape(values, nu);
  std::vector<double> t(values.begin(), values.end());
  for (int i = 0; i < nu.n(); ++i) {
    auto avg = average_out(t, i, nu);
    for (Index x = 0; x < t.size(); ++x) t[x] = rho * t[x] + (1.0 - rho) * avg[x];
  }
  auto w = nu.table();
  double acc = 0.0;
  for (Index x = 0; x < t.size(); ++x) acc += w[x] * values[x] * t[x];
  return acc;
}

double noisy_influence(const FunctionTable& f, int i, double rho, const ProductMeasure& nu) {
  check_rho(rho);
  return spectrum(f, nu).noisy_influence(i, rho);
}

std::vector<double> average_out(std::span<const double> values, int i, const ProductMeasure& nu) {
  check_shape(values, nu);
  check_coordinate(i, nu.n());
  const int s = nu.alphabet_size();
  const Measure& m = nu[i];
  Index stride = checked_power(s, i, kMaxTableSize);
  Index block = stride * static_cast<Index>(s);
  std::vector<double> out(values.size());
  for (Index base = 0; base < values.size(); base += block) {
    for (Index j = base; j < base + stride; ++j) {
      double acc = 0.0;
      for (int a = 0; a < s; ++a) acc += m[a] * values[j + static_cast<Index>(a) * stride];
      for (int a = 0; a < s; ++a) out[j + static_cast<Index>(a) * stride] = acc;
    }
  }
  return out;
}

FunctionTable average_out(const FunctionTable& f, int i, const ProductMeasure& nu) {
  check_domain(f, nu);
  if (f.codomain() == Codomain::Symbol) throw UnsupportedError("averaging needs a numeric codomain");
  auto v = average_out(f.values(), i, nu);
  // Averages of values in [0,1] can leave the interval by one ulp.
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return FunctionTable(f.n(), f.alphabet_size(), Codomain::Real, std::move(v));
}

}  // namespace genpoly
