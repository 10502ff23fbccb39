#pragma once

// Constructive junta regularity: grow J until, for every f_j, all but an eps
// fraction of the mu_j-mass of the cells J <- x carries a regular subfunction.
//
// The potential is Phi(J) = sum_j E_{x ~ mu_j^J} Stab_rho[f_j|_{J <- x}],
// summed over the indicators of Symbol-valued functions. Splitting a cell on
// coordinate i raises its Stab_rho by ((1 - rho)/rho) Inf_i^rho, and
// 0 <= Phi <= m, so growth stops after m rho / ((1 - rho) eps tau) steps.

#include <iosfwd>
#include <span>
#include <vector>

#include "genpoly/errors.hpp"
#include "genpoly/funcspace.hpp"
#include "genpoly/harmonics.hpp"

namespace genpoly {

inline constexpr Index kDefaultRegularityCellCap = Index{1} << 16;

enum class RegularityMode { Noisy, LowDegree };

struct CellRecord {
  Point assignment;  // values on J
  double weight = 0.0;
  RegularityWitness witness;  // coordinate is global
};

struct CellRegularity {
  double regular_fraction = 0.0;
  /// Up to 10 cells of largest maximal influence, worst first.
  std::vector<CellRecord> worst;
};

/// Mass of cells whose subfunction is (d, tau)-regular.
CellRegularity cell_regular_fraction(const FunctionTable& f, std::span<const int> J, int d, double tau,
                                     const ProductMeasure& nu, Index cap = kDefaultRegularityCellCap);
/// Mass of cells where every Inf_i^rho of the subfunction is at most tau.
CellRegularity cell_noisy_regular_fraction(const FunctionTable& f, std::span<const int> J, double rho, double tau,
                                           const ProductMeasure& nu, Index cap = kDefaultRegularityCellCap);

double potential(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus, double rho,
                 std::span<const int> J, Index cap = kDefaultRegularityCellCap);

struct GrowthStep {
  std::vector<int> added;
  /// False when no single coordinate gained enough and every irregular
  /// cell's witness coordinate was added at once.
  bool singleton = true;
};

struct RegularityCertificate {
  RegularityMode mode = RegularityMode::Noisy;
  std::vector<int> J;
  std::vector<int> seed_set;
  double rho = 0.5;
  /// Threshold applied to noisy influences.
  double noisy_tau = 0.0;
  double eps = 0.0;
  /// Low-degree parameters (LowDegree mode).
  int d = 0;
  double tau = 0.0;
  /// d = 1 uses rho = 1/2 in place of 1 - 1/d.
  bool rho_override = false;
  Index cell_cap = kDefaultRegularityCellCap;

  std::vector<double> potential_trace;
  std::vector<GrowthStep> steps;
  double step_bound = 0.0;
  /// Per function: regular mass under the noisy notion, and (LowDegree mode)
  /// under the (d, tau) notion.
  std::vector<double> noisy_regular_fraction;
  std::vector<double> lowdeg_regular_fraction;
  bool success = false;

  /// ((1 - rho)/rho) eps noisy_tau: the guaranteed gain per step.
  double min_increment() const;
  void write(std::ostream& out) const;
};

/// Raised when the cells of the next J would exceed the cap; carries the
/// certificate as it stood before that step.
class RegularityResourceError : public ResourceError {
 public:
  RegularityResourceError(const std::string& what, RegularityCertificate partial)
      : ResourceError(what), partial_(std::move(partial)) {}
  const RegularityCertificate& partial() const { return partial_; }

 private:
  RegularityCertificate partial_;
};

/// Functions must be Bit, Symbol, or Real with values in [0,1]; mus[j] is a
/// product measure on the n coordinates of fs[j].
RegularityCertificate build_junta_noisy(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus,
                                        double rho, double tau, double eps, std::span<const int> seed_set = {},
                                        Index cap = kDefaultRegularityCellCap);

/// Runs the noisy engine with rho = 1 - 1/d and threshold tau rho^d, then
/// re-checks each cell against (d, tau)-regularity.
RegularityCertificate build_junta_lowdeg(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus,
                                         int d, double tau, double eps, std::span<const int> seed_set = {},
                                         Index cap = kDefaultRegularityCellCap);

}  // namespace genpoly
