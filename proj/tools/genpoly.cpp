// Command-line front end: predicates, harmonic analysis, regularity,
// violation measurement, correction pipelines and seeded experiments.
//
// Exit codes: 0 success, 2 rejected correction, 1 error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "genpoly/corrector.hpp"
#include "genpoly/errors.hpp"
#include "genpoly/experiment.hpp"
#include "genpoly/harmonics.hpp"
#include "genpoly/polytest.hpp"
#include "genpoly/regularity.hpp"

using namespace genpoly;

namespace {

constexpr int kRejected = 2;

std::vector<int> parse_coords(const std::string& list) {
  std::vector<int> out;
  if (list.empty()) return out;
  std::stringstream ss(list);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int v = std::stoi(part);
    if (v < 1) throw ParseError("coordinates are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

std::vector<FunctionTable> load_functions(const std::vector<std::string>& files) {
  std::vector<FunctionTable> fs;
  for (const auto& f : files) fs.push_back(load_function(f));
  return fs;
}

/// Measure for function j: marginal of the predicate, a p-biased product, or uniform.
ProductMeasure measure_for(const FunctionTable& f, int j, const std::optional<Predicate>& P, std::optional<double> p) {
  if (P) return ProductMeasure::iid(f.n(), P->marginal_measure(j));
  if (p) return ProductMeasure::biased(f.n(), *p);
  return ProductMeasure::uniform(f.n(), f.alphabet_size());
}

void print_violation(const ViolationReport& r, int s) {
  std::cout << "violation " << r.probability;
  if (r.method == ViolationMethod::MonteCarlo) {
    std::cout << " samples=" << r.samples << " ci95=[" << r.interval.lower << "," << r.interval.upper << "]";
  } else {
    std::cout << " exhaustive";
  }
  std::cout << "\n";
  if (r.counterexample) {
    std::cout << "counterexample";
    for (const auto& x : *r.counterexample) std::cout << ' ' << format_point(x, s);
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate generalized polymorphisms: measurement and correction"};
  app.require_subcommand(1);
  std::cout.precision(15);

  // validate
  std::string pred_file;
  auto* validate_cmd = app.add_subcommand("validate", "Check a predicate file and print marginals and flags");
  validate_cmd->add_option("--pred", pred_file, "Predicate file")->required()->check(CLI::ExistingFile);

  // analyze
  std::string fn_file;
  std::optional<double> bias;
  int analyze_d = 2;
  double analyze_tau = 0.05;
  double min_norm2 = 0.0;
  std::string analyze_pred;
  int analyze_coord = 1;
  auto* analyze_cmd = app.add_subcommand("analyze", "Efron-Stein spectrum, influences and regularity of a function");
  analyze_cmd->add_option("--fn", fn_file, "Function file")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--p", bias, "p-biased product measure (binary)");
  analyze_cmd->add_option("--pred", analyze_pred, "Use the marginal of this predicate")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--coord", analyze_coord, "Predicate coordinate for --pred (1-based)");
  analyze_cmd->add_option("--d", analyze_d, "Degree for low-degree influences");
  analyze_cmd->add_option("--tau", analyze_tau, "Regularity threshold");
  analyze_cmd->add_option("--min-norm2", min_norm2, "Hide components below this squared norm");

  // regularize
  std::vector<std::string> reg_fns;
  std::string reg_pred, reg_mode = "lowdeg", reg_seed_set;
  std::optional<double> reg_p;
  double reg_rho = 0.5, reg_tau = 0.05, reg_eps = 0.1;
  int reg_d = 2;
  Index reg_cap = kDefaultRegularityCellCap;
  auto* reg_cmd = app.add_subcommand("regularize", "Grow a junta J making almost every cell regular");
  reg_cmd->add_option("--fn", reg_fns, "Function files")->required()->check(CLI::ExistingFile);
  reg_cmd->add_option("--pred", reg_pred, "Measures from predicate marginals")->check(CLI::ExistingFile);
  reg_cmd->add_option("--p", reg_p, "p-biased measure for every function");
  reg_cmd->add_option("--mode", reg_mode, "noisy or lowdeg")->check(CLI::IsMember({"noisy", "lowdeg"}));
  reg_cmd->add_option("--rho", reg_rho, "Noise rate (noisy mode)");
  reg_cmd->add_option("--d", reg_d, "Degree (lowdeg mode)");
  reg_cmd->add_option("--tau", reg_tau, "Influence threshold");
  reg_cmd->add_option("--eps", reg_eps, "Allowed irregular mass");
  reg_cmd->add_option("--seed-set", reg_seed_set, "Initial coordinates, e.g. 1,4");
  reg_cmd->add_option("--cell-cap", reg_cap, "Largest number of cells");

  // polytest
  std::vector<std::string> pt_fns;
  std::string pt_pred, pt_engine = "auto";
  std::uint64_t pt_samples = 100000, pt_seed = 1;
  Index pt_cap = kDefaultViolationCap;
  auto* pt_cmd = app.add_subcommand("polytest", "Measure violation or decide polymorphism");
  pt_cmd->require_subcommand(1);
  auto add_pt = [&](CLI::App* c) {
    c->add_option("--pred", pt_pred, "Predicate file")->required()->check(CLI::ExistingFile);
    c->add_option("--fn", pt_fns, "One function file per coordinate")->required()->check(CLI::ExistingFile);
    c->add_option("--cap", pt_cap, "Enumeration cap");
  };
  auto* pt_exact = pt_cmd->add_subcommand("exact", "Exhaustive violation probability");
  add_pt(pt_exact);
  pt_exact->add_option("--engine", pt_engine, "auto, odometer or contraction")
      ->check(CLI::IsMember({"auto", "odometer", "contraction"}));
  auto* pt_mc = pt_cmd->add_subcommand("mc", "Monte Carlo violation estimate with a 95% Wilson interval");
  add_pt(pt_mc);
  pt_mc->add_option("--samples", pt_samples, "Number of samples");
  pt_mc->add_option("--seed", pt_seed, "Seed");
  auto* pt_check = pt_cmd->add_subcommand("check", "Decide exact generalized polymorphism");
  add_pt(pt_check);

  // correct
  std::vector<std::string> cor_fns;
  std::string cor_pred, out_dir, csv_file;
  CorrectionParams prm;
  std::optional<double> eta, budget;
  std::optional<std::string> q_text;
  double frac_p = 0.0;
  auto* cor_cmd = app.add_subcommand("correct", "Correct approximate polymorphisms");
  cor_cmd->require_subcommand(1);
  auto add_cor = [&](CLI::App* c, bool needs_pred) {
    auto* o = c->add_option("--pred", cor_pred, "Predicate file")->check(CLI::ExistingFile);
    if (needs_pred) o->required();
    c->add_option("--fn", cor_fns, "One function file per coordinate")->required()->check(CLI::ExistingFile);
    c->add_option("--eps", prm.eps, "Distance target");
    c->add_option("--eta", eta, "Rounding threshold");
    c->add_option("--d", prm.d, "Regularity degree");
    c->add_option("--tau", prm.tau, "Regularity threshold");
    c->add_option("--attempts", prm.attempts, "Restriction attempts");
    c->add_option("--seed", prm.seed, "Seed");
    c->add_option("--q", q_text, "Star probability of the restriction law, e.g. 1/12");
    c->add_option("--budget", budget, "Largest accepted distance (default eps)");
    c->add_option("--out-dir", out_dir, "Write g_j to <dir>/g<j>.fn");
    c->add_option("--csv", csv_file, "Append an experiment row to this CSV file");
  };
  auto* cor_mono = cor_cmd->add_subcommand("monotone", "Monotone predicate: zero irregular or light cells");
  add_cor(cor_mono, true);
  auto* cor_gen = cor_cmd->add_subcommand("general", "Binary predicate: peel relations, round cells");
  add_cor(cor_gen, true);
  auto* cor_alpha = cor_cmd->add_subcommand("alphabet", "All-flexible predicate over any alphabet");
  add_cor(cor_alpha, true);
  auto* cor_frac = cor_cmd->add_subcommand("fractional", "[0,1]-valued pair on p-biased NAND");
  add_cor(cor_frac, false);
  cor_frac->add_option("--p", frac_p, "NAND bias, 0 < p < 1/2")->required();

  // blr
  std::string blr_fn, blr_pred;
  std::optional<double> blr_p;
  int blr_coord = 1;
  auto* blr_cmd = app.add_subcommand("blr", "Nearest character of a Boolean function");
  blr_cmd->add_option("--fn", blr_fn, "Function file")->required()->check(CLI::ExistingFile);
  blr_cmd->add_option("--p", blr_p, "p-biased measure (exhaustive nearest character)");
  blr_cmd->add_option("--pred", blr_pred, "Use the marginal of this predicate")->check(CLI::ExistingFile);
  blr_cmd->add_option("--coord", blr_coord, "Predicate coordinate for --pred (1-based)");

  // agree
  std::string chain_file, agree_fn;
  auto* agree_cmd = app.add_subcommand("agree", "Agreement statistics on a product Markov chain");
  agree_cmd->add_option("--chain", chain_file, "Chain file")->required()->check(CLI::ExistingFile);
  agree_cmd->add_option("--fn", agree_fn, "Function over Y^n")->required()->check(CLI::ExistingFile);

  // fr-lift
  std::string family_file, lift_out;
  auto* lift_cmd = app.add_subcommand("fr-lift", "Fractional lift of a k-uniform family");
  lift_cmd->add_option("--family", family_file, "Family file")->required()->check(CLI::ExistingFile);
  lift_cmd->add_option("--out", lift_out, "Write the lifted function here (default stdout)");

  // experiment
  std::string config_file, experiment_out;
  bool wall_time = false;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded batch and emit CSV rows");
  exp_cmd->add_option("--config", config_file, "Experiment INI file")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", experiment_out, "CSV output (default stdout)");
  exp_cmd->add_flag("--wall-time", wall_time, "Add a wall_ms column (not rerun-stable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      auto P = load_predicate(pred_file);
      write_report(std::cout, P, validate(P));
      return 0;
    }

    if (*analyze_cmd) {
      auto f = load_function(fn_file);
      std::optional<Predicate> P;
      if (!analyze_pred.empty()) P = load_predicate(analyze_pred);
      auto nu = measure_for(f, analyze_coord - 1, P, bias);
      auto dec = efron_stein(f, nu, false);
      auto spec = spectrum(f, nu);
      std::cout << "function n=" << f.n() << " sigma=" << f.alphabet_size() << " codomain=" << to_string(f.codomain())
                << "\n";
      if (f.codomain() != Codomain::Symbol) {
        std::cout << "expectation " << expectation(f, nu) << "\n";
        std::cout << "total " << spec.total() << "\n";
        for (std::size_t k = 0; k < spec.level.size(); ++k) std::cout << "level " << k << ' ' << spec.level[k] << "\n";
        for (int i = 0; i < f.n(); ++i) {
          double inf = 0.0;
          for (double v : spec.influence[static_cast<std::size_t>(i)]) inf += v;
          std::cout << "influence " << i + 1 << " total=" << inf << " lowdeg=" << spec.low_degree_influence(i, analyze_d)
                    << "\n";
        }
        dec.write(std::cout, min_norm2);
      }
      auto reg = is_regular(f, analyze_d, analyze_tau, nu);
      std::cout << "regular d=" << analyze_d << " tau=" << analyze_tau << " " << (reg.regular ? "yes" : "no")
                << " max_influence=" << reg.max_influence << " coordinate=" << reg.coordinate + 1;
      if (reg.symbol >= 0) std::cout << " symbol=" << reg.symbol;
      std::cout << "\n";
      return 0;
    }

    if (*reg_cmd) {
      auto fs = load_functions(reg_fns);
      std::optional<Predicate> P;
      if (!reg_pred.empty()) P = load_predicate(reg_pred);
      if (P && P->arity() != static_cast<int>(fs.size())) throw DomainError("one function per predicate coordinate");
      std::vector<ProductMeasure> mus;
      for (std::size_t j = 0; j < fs.size(); ++j) mus.push_back(measure_for(fs[j], static_cast<int>(j), P, reg_p));
      auto seed_set = parse_coords(reg_seed_set);
      try {
        auto cert = reg_mode == "noisy" ? build_junta_noisy(fs, mus, reg_rho, reg_tau, reg_eps, seed_set, reg_cap)
                                        : build_junta_lowdeg(fs, mus, reg_d, reg_tau, reg_eps, seed_set, reg_cap);
        cert.write(std::cout);
      } catch (const RegularityResourceError& e) {
        e.partial().write(std::cout);
        throw;
      }
      return 0;
    }

    if (*pt_cmd) {
      auto P = load_predicate(pt_pred);
      auto fs = load_functions(pt_fns);
      if (*pt_exact) {
        Engine engine = pt_engine == "odometer" ? Engine::Odometer
                        : pt_engine == "contraction" ? Engine::Contraction
                                                     : Engine::Auto;
        print_violation(violation_exact(P, fs, engine, pt_cap), P.alphabet_size());
      } else if (*pt_mc) {
        print_violation(violation_mc(P, fs, pt_samples, pt_seed), P.alphabet_size());
      } else {
        auto r = is_generalized_polymorphism(P, fs, pt_cap);
        std::cout << "polymorphism " << (r.holds ? "yes" : "no") << "\n";
        if (r.counterexample) {
          std::cout << "counterexample";
          for (const auto& x : *r.counterexample) std::cout << ' ' << format_point(x, P.alphabet_size());
          std::cout << "\n";
        }
      }
      return 0;
    }

    if (*cor_cmd) {
      prm.eta = eta;
      prm.budget = budget;
      if (q_text) prm.q = parse_rational(*q_text);
      auto fs = load_functions(cor_fns);
      Pipeline pipeline = *cor_mono ? Pipeline::Monotone
                          : *cor_gen ? Pipeline::General
                          : *cor_alpha ? Pipeline::Alphabet
                                       : Pipeline::Fractional;
      Predicate P = pipeline == Pipeline::Fractional
                        ? Predicate(2, 2, {Point{0, 0}, Point{1, 0}, Point{0, 1}},
                                    std::vector<double>{1 - 2 * frac_p, frac_p, frac_p})
                        : load_predicate(cor_pred);
      std::optional<double> before;
      bool discrete = std::all_of(fs.begin(), fs.end(), [](const FunctionTable& f) { return f.is_discrete(); });
      auto result = run_pipeline(pipeline, P, fs, prm, frac_p);
      result.write(std::cout);
      if (result.certificate) result.certificate->write(std::cout);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (std::size_t j = 0; j < result.gs.size(); ++j) {
          save_function((std::filesystem::path(out_dir) / ("g" + std::to_string(j + 1) + ".fn")).string(), result.gs[j]);
        }
      }
      if (!csv_file.empty()) {
        ExperimentRow row;
        row.run = "correct";
        row.pipeline = pipeline;
        row.n = fs[0].n();
        row.m = P.arity();
        row.seed = prm.seed;
        const int n = fs[0].n();
        const bool enumerable = std::min(odometer_cost(P, n), contraction_cost(P, n)) <= kDefaultViolationCap;
        if (discrete && enumerable) before = violation_exact(P, fs).probability;
        row.violation_before = before;
        if (enumerable) row.violation_after = violation_exact(P, result.gs).probability;
        row.accepted = result.accepted;
        row.exact = result.exact;
        row.junta_size = static_cast<int>(result.J.size());
        row.distances = result.distances;
        row.eta = result.eta;
        row.attempts = static_cast<int>(result.attempts.size());
        for (const auto& note : result.notes) row.notes += (row.notes.empty() ? "" : "; ") + note;
        const bool fresh = !std::filesystem::exists(csv_file) || std::filesystem::file_size(csv_file) == 0;
        std::ofstream csv(csv_file, std::ios::app);
        if (fresh) write_csv_header(csv);
        write_csv_row(csv, row);
      }
      return result.accepted ? 0 : kRejected;
    }

    if (*blr_cmd) {
      auto f = load_function(blr_fn);
      CharacterFit fit;
      if (blr_p || !blr_pred.empty()) {
        std::optional<Predicate> P;
        if (!blr_pred.empty()) P = load_predicate(blr_pred);
        fit = nearest_character(f, measure_for(f, blr_coord - 1, P, blr_p));
      } else {
        fit = blr_decode_uniform(f);
      }
      std::cout << "character S=" << format_support(fit.chi.support) << " b=" << fit.chi.offset
                << " distance=" << fit.distance << " max_coefficient=" << fit.max_coefficient << "\n";
      return 0;
    }

    if (*agree_cmd) {
      auto chain = load_chain(chain_file);
      auto f = load_function(agree_fn);
      auto r = markov_agreement(chain, f);
      std::cout << "agreement sigma=" << r.sigma << " disagreement=" << r.disagreement << " lambda=" << r.lambda
                << " factor_bound=" << r.factor_bound << " bound=" << r.bound << " mismatch=" << r.mismatch
                << " holds=" << (r.holds ? 1 : 0) << "\n";
      return 0;
    }

    if (*lift_cmd) {
      auto fam = load_family(family_file);
      auto f = friedgut_regev_lift(fam.members, fam.n, fam.k);
      if (lift_out.empty()) {
        write_function(std::cout, f);
      } else {
        save_function(lift_out, f);
      }
      return 0;
    }

    if (*exp_cmd) {
      auto cfg = load_experiment(config_file);
      auto rows = run_experiment(cfg);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!experiment_out.empty()) {
        file.open(experiment_out);
        if (!file) throw Error("cannot write " + experiment_out);
        out = &file;
      }
      write_csv_header(*out, wall_time);
      for (const auto& row : rows) write_csv_row(*out, row, wall_time);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
