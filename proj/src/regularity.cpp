#include "genpoly/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "numeric.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

constexpr std::size_t kWorstCells = 10;
// Influence comparisons near the threshold tolerate summation noise.
constexpr double kInfluenceSlack = 1e-12;

void check_inputs(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus) {
  if (fs.empty()) throw DomainError("at least one function is required");
  if (fs.size() != mus.size()) throw DomainError("one measure per function is required");
  const int n = fs[0].n();
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (fs[j].n() != n) throw DomainError("functions must share n");
    if (mus[j].n() != n || mus[j].alphabet_size() != fs[j].alphabet_size()) {
      throw DomainError("measure " + std::to_string(j + 1) + " does not match its function");
    }
    if (fs[j].codomain() == Codomain::Real) {
      for (double v : fs[j].values()) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("real-valued functions must take values in [0,1]");
      }
    }
  }
}

std::vector<int> normalized_set(std::span<const int> J, int n) {
  std::vector<int> out(J.begin(), J.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int i : out) {
    if (i < 0 || i >= n) throw DomainError("coordinate " + std::to_string(i + 1) + " out of range");
  }
  return out;
}

/// The [0,1]-valued tables whose stabilities make up one function's potential.
std::vector<std::vector<double>> targets(const FunctionTable& f) {
  if (f.codomain() != Codomain::Symbol) return {std::vector<double>(f.values().begin(), f.values().end())};
  std::vector<std::vector<double>> out(static_cast<std::size_t>(f.output_size()),
                                       std::vector<double>(f.size(), 0.0));
  for (Index x = 0; x < f.size(); ++x) out[static_cast<std::size_t>(f.symbol(x))][x] = 1.0;
  return out;
}

struct Scan {
  double phi = 0.0;
  /// gain[i] = sum over functions, targets and cells of weight * Inf_i^rho.
  std::vector<double> gain;
  std::vector<double> irregular_mass;
  /// Witness coordinates of irregular cells, per function.
  std::vector<std::vector<int>> witnesses;
};

Scan scan(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus, double rho, double tau,
          const std::vector<int>& J, Index cap) {
  const int n = fs[0].n();
  const auto free = complement(n, J);
  Scan out;
  out.gain.assign(static_cast<std::size_t>(n), 0.0);
  out.irregular_mass.assign(fs.size(), 0.0);
  out.witnesses.resize(fs.size());
  CompensatedSum phi;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const auto tables = targets(fs[j]);
    const auto nu_J = mus[j].select(J);
    const auto nu_free = mus[j].select(free);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    CompensatedSum irregular;
    // Cells are walked once per target; the subfunction layout is shared.
    std::vector<double> worst(checked_power(fs[j].alphabet_size(), static_cast<int>(J.size()), cap), 0.0);
    std::vector<int> worst_at(worst.size(), -1);
    std::vector<double> weight(worst.size(), 0.0);
    for (const auto& t : tables) {
      FunctionTable tf(n, fs[j].alphabet_size(), Codomain::Real, t);
      for_each_cell(
          tf, J, nu_J,
          [&](const Cell& c) {
            weight[c.index] = c.weight;
            if (c.weight == 0.0) return;
            auto sp = spectrum(c.subfunction.values(), nu_free);
            phi.add(c.weight * sp.stability(rho));
            for (int k = 0; k < sp.n; ++k) {
              double inf = sp.noisy_influence(k, rho);
              out.gain[static_cast<std::size_t>(free[static_cast<std::size_t>(k)])] += c.weight * inf;
              if (inf > worst[c.index] + kInfluenceSlack) {
                worst[c.index] = inf;
                worst_at[c.index] = free[static_cast<std::size_t>(k)];
              }
            }
          },
          cap);
    }
    for (Index c = 0; c < worst.size(); ++c) {
      if (worst[c] > tau + kInfluenceSlack) {
        irregular.add(weight[c]);
        auto i = static_cast<std::size_t>(worst_at[c]);
        if (!seen[i]) {
          seen[i] = true;
          out.witnesses[j].push_back(worst_at[c]);
        }
      }
    }
    out.irregular_mass[j] = irregular.value();
  }
  out.phi = phi.value();
  return out;
}

CellRegularity finish(std::vector<CellRecord> cells, double regular) {
  std::stable_sort(cells.begin(), cells.end(), [](const CellRecord& a, const CellRecord& b) {
    return a.witness.max_influence > b.witness.max_influence;
  });
  if (cells.size() > kWorstCells) cells.resize(kWorstCells);
  return {std::min(1.0, regular), std::move(cells)};
}

std::string list_1based(std::span<const int> v) {
  std::string out;
  for (int i : v) {
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1);
  }
  return out;
}

}  // namespace

CellRegularity cell_regular_fraction(const FunctionTable& f, std::span<const int> J, int d, double tau,
                                     const ProductMeasure& nu, Index cap) {
  if (nu.n() != f.n()) throw DomainError("measure does not match the function");
  auto Js = normalized_set(J, f.n());
  const auto free = complement(f.n(), Js);
  const auto nu_free = nu.select(free);
  std::vector<CellRecord> cells;
  CompensatedSum regular;
  for_each_cell(
      f, Js, nu.select(Js),
      [&](const Cell& c) {
        auto w = is_regular(c.subfunction, d, tau, nu_free);
        if (w.coordinate >= 0) w.coordinate = free[static_cast<std::size_t>(w.coordinate)];
        if (w.regular) regular.add(c.weight);
        cells.push_back({c.assignment, c.weight, w});
      },
      cap);
  return finish(std::move(cells), regular.value());
}

CellRegularity cell_noisy_regular_fraction(const FunctionTable& f, std::span<const int> J, double rho, double tau,
                                           const ProductMeasure& nu, Index cap) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
  if (nu.n() != f.n()) throw DomainError("measure does not match the function");
  auto Js = normalized_set(J, f.n());
  const auto free = complement(f.n(), Js);
  const auto nu_free = nu.select(free);
  const bool symbols = f.codomain() == Codomain::Symbol;
  std::vector<CellRecord> cells;
  CompensatedSum regular;
  for_each_cell(
      f, Js, nu.select(Js),
      [&](const Cell& c) {
        RegularityWitness w;
        const int outputs = symbols ? f.output_size() : 1;
        for (int sigma = 0; sigma < outputs; ++sigma) {
          auto g = symbols ? indicator(c.subfunction, sigma) : c.subfunction;
          auto sp = spectrum(g.values(), nu_free);
          for (int k = 0; k < sp.n; ++k) {
            double inf = sp.noisy_influence(k, rho);
            if (inf > w.max_influence + kInfluenceSlack) {
              w.max_influence = inf;
              w.coordinate = free[static_cast<std::size_t>(k)];
              w.symbol = symbols ? sigma : -1;
            }
          }
        }
        w.regular = w.max_influence <= tau + kInfluenceSlack;
        if (w.regular) regular.add(c.weight);
        cells.push_back({c.assignment, c.weight, w});
      },
      cap);
  return finish(std::move(cells), regular.value());
}

double potential(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus, double rho,
                 std::span<const int> J, Index cap) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
  check_inputs(fs, mus);
  return scan(fs, mus, rho, 1.0, normalized_set(J, fs[0].n()), cap).phi;
}

double RegularityCertificate::min_increment() const { return (1 - rho) / rho * eps * noisy_tau; }

void RegularityCertificate::write(std::ostream& out) const {
  using text::format_double;
  out << "certificate mode=" << (mode == RegularityMode::Noisy ? "noisy" : "lowdeg") << " rho=" << format_double(rho)
      << " noisy_tau=" << format_double(noisy_tau) << " eps=" << format_double(eps);
  if (mode == RegularityMode::LowDegree) out << " d=" << d << " tau=" << format_double(tau);
  if (rho_override) out << " rho_override=1";
  out << " cell_cap=" << cell_cap << "\n";
  out << "status " << (success ? "regular" : "incomplete") << "\n";
  out << "J=" << list_1based(J) << "\n";
  out << "seed_set=" << list_1based(seed_set) << "\n";
  out << "steps=" << steps.size() << " step_bound=" << format_double(step_bound)
      << " min_increment=" << format_double(min_increment()) << "\n";
  out << "potential";
  for (double v : potential_trace) out << ' ' << format_double(v);
  out << "\n";
  for (std::size_t t = 0; t < steps.size(); ++t) {
    out << "step " << t + 1 << " added=" << list_1based(steps[t].added)
        << " kind=" << (steps[t].singleton ? "singleton" : "witnesses") << "\n";
  }
  for (std::size_t j = 0; j < noisy_regular_fraction.size(); ++j) {
    out << "function " << j + 1 << " noisy_regular=" << format_double(noisy_regular_fraction[j]);
    if (j < lowdeg_regular_fraction.size()) out << " lowdeg_regular=" << format_double(lowdeg_regular_fraction[j]);
    out << "\n";
  }
}

RegularityCertificate build_junta_noisy(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus,
                                        double rho, double tau, double eps, std::span<const int> seed_set,
                                        Index cap) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  check_inputs(fs, mus);
  const int n = fs[0].n();
  const int s = fs[0].alphabet_size();
  for (const auto& f : fs) {
    if (f.alphabet_size() != s) throw DomainError("functions must share the alphabet");
  }

  RegularityCertificate cert;
  cert.seed_set = normalized_set(seed_set, n);
  cert.J = cert.seed_set;
  cert.rho = rho;
  cert.noisy_tau = tau;
  cert.eps = eps;
  cert.cell_cap = cap;
  cert.step_bound = static_cast<double>(fs.size()) * rho / ((1 - rho) * eps * tau);

  auto over_cap = [&](const std::vector<int>& J) {
    Index cells = 1;
    for (std::size_t k = 0; k < J.size(); ++k) {
      if (cells > cap / static_cast<Index>(s)) return true;
      cells *= static_cast<Index>(s);
    }
    return cells > cap;
  };
  auto record = [&](const Scan& sc) {
    cert.noisy_regular_fraction.clear();
    for (double m : sc.irregular_mass) cert.noisy_regular_fraction.push_back(std::min(1.0, 1.0 - m));
  };
  if (over_cap(cert.J)) throw RegularityResourceError("the seed set already exceeds the cell cap", cert);

  Scan sc = scan(fs, mus, rho, tau, cert.J, cap);
  cert.potential_trace.push_back(sc.phi);
  record(sc);
  auto failing = [&] {
    return std::any_of(sc.irregular_mass.begin(), sc.irregular_mass.end(), [&](double m) { return m > eps; });
  };
  while (failing()) {
    GrowthStep step;
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (std::binary_search(cert.J.begin(), cert.J.end(), i)) continue;
      if (best < 0 || sc.gain[static_cast<std::size_t>(i)] > sc.gain[static_cast<std::size_t>(best)]) best = i;
    }
    if (best >= 0 && sc.gain[static_cast<std::size_t>(best)] >= eps * tau) {
      step.added = {best};
    } else {
      // Split every irregular cell of each failing function on its witness.
      step.singleton = false;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        if (sc.irregular_mass[j] <= eps) continue;
        step.added.insert(step.added.end(), sc.witnesses[j].begin(), sc.witnesses[j].end());
      }
      std::sort(step.added.begin(), step.added.end());
      step.added.erase(std::unique(step.added.begin(), step.added.end()), step.added.end());
    }
    std::vector<int> next = cert.J;
    next.insert(next.end(), step.added.begin(), step.added.end());
    std::sort(next.begin(), next.end());
    if (over_cap(next)) {
      throw RegularityResourceError("growing J to " + std::to_string(next.size()) +
                                        " coordinates would exceed the cell cap of " + std::to_string(cap),
                                    cert);
    }
    cert.J = std::move(next);
    cert.steps.push_back(std::move(step));
    sc = scan(fs, mus, rho, tau, cert.J, cap);
    cert.potential_trace.push_back(sc.phi);
    record(sc);
  }
  cert.success = true;
  return cert;
}

RegularityCertificate build_junta_lowdeg(std::span<const FunctionTable> fs, std::span<const ProductMeasure> mus,
                                         int d, double tau, double eps, std::span<const int> seed_set, Index cap) {
  if (d < 1) throw DomainError("d must be at least 1");
  const bool override_rho = d == 1;
  const double rho = override_rho ? 0.5 : 1.0 - 1.0 / d;
  const double noisy_tau = tau * std::pow(rho, d);
  RegularityCertificate cert;
  try {
    cert = build_junta_noisy(fs, mus, rho, noisy_tau, eps, seed_set, cap);
  } catch (const RegularityResourceError& e) {
    auto partial = e.partial();
    partial.mode = RegularityMode::LowDegree;
    partial.d = d;
    partial.tau = tau;
    partial.rho_override = override_rho;
    throw RegularityResourceError(e.what(), std::move(partial));
  }
  cert.mode = RegularityMode::LowDegree;
  cert.d = d;
  cert.tau = tau;
  cert.rho_override = override_rho;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    cert.lowdeg_regular_fraction.push_back(cell_regular_fraction(fs[j], cert.J, d, tau, mus[j], cap).regular_fraction);
  }
  return cert;
}

}  // namespace genpoly
