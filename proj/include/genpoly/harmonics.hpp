#pragma once

// Biased Fourier and Efron-Stein analysis over product measures.
//
// Every query goes through one coordinate-by-coordinate change of basis into
// a per-coordinate orthonormal basis (phi_0 = 1, the rest by Gram-Schmidt on
// the symbol indicators). On {0,1} with bias p this is exactly
// phi(x) = (x - p) / sqrt(p(1-p)). Squared coefficients are then folded into
// a level table and a coordinate-by-level table, which answer all influence
// and stability queries without materializing the 2^n components.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "genpoly/funcspace.hpp"

namespace genpoly {

/// Squared component mass of f, folded by level and coordinate.
struct Spectrum {
  int n = 0;
  /// level[k] = sum_{|S| = k} ||f_S||^2
  std::vector<double> level;
  /// influence[i][k] = sum_{|S| = k, i in S} ||f_S||^2
  std::vector<std::vector<double>> influence;

  double total() const;
  double stability(double rho) const;
  double noisy_influence(int i, double rho) const;
  double low_degree_influence(int i, int d) const;
  /// Sum_{|S| <= d} ||f_S||^2
  double low_degree_mass(int d) const;
};

/// Orthonormal basis for one coordinate: basis[k][a] = phi_k(a), phi_0 = 1.
std::vector<std::vector<double>> coordinate_basis(const Measure& m);

/// Coefficients of f in the product basis, indexed mixed-radix by the basis
/// multi-index (on binary domains the index is the subset mask).
std::vector<double> basis_coefficients(std::span<const double> values, const ProductMeasure& nu);

Spectrum spectrum(std::span<const double> values, const ProductMeasure& nu);
Spectrum spectrum(const FunctionTable& f, const ProductMeasure& nu);

struct Decomposition {
  ProductMeasure base;
  int n = 0;
  int alphabet_size = 2;
  /// ||f_S||^2 indexed by subset mask.
  std::vector<double> norm2;
  /// Binary biased basis only: fhat(S) indexed by subset mask.
  std::vector<double> coefficients;
  /// Efron-Stein component tables f_S indexed by subset mask (when requested).
  std::vector<std::vector<double>> components;

  /// Rows "S=<list> norm2=<v>" sorted by |S| then lexicographically, skipping
  /// components with norm2 below `min_norm2`.
  void write(std::ostream& out, double min_norm2 = 0.0) const;
};

/// Components are materialized only while 2^n * s^n stays under this.
inline constexpr Index kMaxComponentEntries = Index{1} << 24;

/// Binary-domain biased expansion with per-coordinate biases p.
Decomposition fourier_expand(const FunctionTable& f, std::span<const double> p);
/// Efron-Stein decomposition; with `materialize` the component functions are
/// built by inclusion-exclusion over conditional expectations.
Decomposition efron_stein(const FunctionTable& f, const ProductMeasure& nu, bool materialize = true);

double low_degree_influence(const FunctionTable& f, int i, int d, const ProductMeasure& nu);

struct RegularityWitness {
  bool regular = true;
  int coordinate = -1;  // coordinate of maximal influence
  int symbol = -1;      // indicator symbol for Symbol codomains, else -1
  double max_influence = 0.0;
};

/// Indicator x -> [f(x) = sigma] of a discrete table.
FunctionTable indicator(const FunctionTable& f, int sigma);

/// (d,tau)-regularity; Symbol tables are checked through every indicator.
RegularityWitness is_regular(const FunctionTable& f, int d, double tau, const ProductMeasure& nu);

/// Stab_rho[f] = sum_S rho^|S| ||f_S||^2.
double noise_stability(const FunctionTable& f, double rho, const ProductMeasure& nu);
/// Stab_rho[f] = E[f(x) f(y)] with y a rho-correlated copy of x, computed
/// exactly by applying the noise operator one coordinate at a time.
double noise_stability_direct(std::span<const double> values, double rho, const ProductMeasure& nu);

double noisy_influence(const FunctionTable& f, int i, double rho, const ProductMeasure& nu);

/// E_i f: coordinate i averaged out under nu_i.
FunctionTable average_out(const FunctionTable& f, int i, const ProductMeasure& nu);
std::vector<double> average_out(std::span<const double> values, int i, const ProductMeasure& nu);

}  // namespace genpoly
