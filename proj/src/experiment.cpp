#include "genpoly/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "genpoly/errors.hpp"
#include "genpoly/polytest.hpp"
#include "genpoly/rng.hpp"
#include "text_util.hpp"

namespace genpoly {

namespace {

std::optional<double> exact_violation(const Predicate& P, std::span<const FunctionTable> fs, Index cap) {
  for (const auto& f : fs) {
    if (!f.is_discrete()) return std::nullopt;
  }
  const int n = fs[0].n();
  if (std::min(odometer_cost(P, n), contraction_cost(P, n)) > cap) return std::nullopt;
  return violation_exact(P, fs, Engine::Auto, cap).probability;
}

std::string csv_number(std::optional<double> v) { return v ? text::format_double(*v) : std::string(); }

}  // namespace

PlantedInstance plant_and_perturb(const Predicate& P, std::vector<FunctionTable> exact, double flip,
                                  std::uint64_t seed, bool shared_noise, Index cap) {
  if (!(flip >= 0.0 && flip < 0.5)) throw DomainError("flip rate must lie in [0, 1/2)");
  if (static_cast<int>(exact.size()) != P.arity()) throw DomainError("one planted function per coordinate is required");
  for (const auto& f : exact) {
    if (!f.is_discrete() || f.alphabet_size() != P.alphabet_size() || f.output_size() != P.alphabet_size()) {
      throw DomainError("planted functions must map Sigma^n to Sigma");
    }
    if (f.n() != exact[0].n()) throw DomainError("planted functions must share n");
  }
  if (!is_generalized_polymorphism(P, exact, cap).holds) {
    throw ValidationError("planted functions are not a generalized polymorphism");
  }
  const int s = P.alphabet_size();
  PlantedInstance out;
  for (std::size_t j = 0; j < exact.size(); ++j) {
    // Equal planted functions share the noise stream of their first copy.
    std::size_t stream = j;
    if (shared_noise) {
      stream = static_cast<std::size_t>(std::find(exact.begin(), exact.end(), exact[j]) - exact.begin());
    }
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(stream)));
    std::vector<double> vals(exact[j].values().begin(), exact[j].values().end());
    Index changed = 0;
    for (auto& v : vals) {
      const bool hit = rng.bernoulli(flip);
      const auto shift = s > 2 ? rng.below(static_cast<std::uint64_t>(s - 1)) + 1 : 1;
      if (hit) {
        v = static_cast<double>((static_cast<std::uint64_t>(v) + shift) % static_cast<std::uint64_t>(s));
        ++changed;
      }
    }
    out.changed.push_back(static_cast<double>(changed) / static_cast<double>(vals.size()));
    out.fs.push_back(exact[j].with_values(std::move(vals)));
  }
  out.exact = std::move(exact);
  out.violation = exact_violation(P, out.fs, cap);
  return out;
}

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Monotone: return "monotone";
    case Pipeline::General: return "general";
    case Pipeline::Alphabet: return "alphabet";
    case Pipeline::Fractional: return "fractional";
  }
  return "?";
}

Pipeline parse_pipeline(std::string_view text) {
  if (text == "monotone") return Pipeline::Monotone;
  if (text == "general") return Pipeline::General;
  if (text == "alphabet") return Pipeline::Alphabet;
  if (text == "fractional") return Pipeline::Fractional;
  throw ParseError("unknown pipeline '" + std::string(text) + "'");
}

CorrectionResult run_pipeline(Pipeline pipeline, const Predicate& P, std::span<const FunctionTable> fs,
                              const CorrectionParams& params, double p) {
  switch (pipeline) {
    case Pipeline::Monotone: return correct_monotone(P, fs, params);
    case Pipeline::General: return correct_general(P, fs, params);
    case Pipeline::Alphabet: return correct_alphabet(P, fs, params);
    case Pipeline::Fractional:
      if (fs.size() != 2) throw DomainError("the fractional pipeline takes two functions");
      return correct_fractional_nand(fs[0], fs[1], p, params);
  }
  throw DomainError("unknown pipeline");
}

ExperimentConfig read_experiment(std::istream& in, const std::string& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  auto resolve = [&](const std::string& path) {
    std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
  };
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key != "seed") throw ParseError("unknown top-level key '" + key + "'");
      cfg.seed = text::parse_u64(node.data());
      continue;
    }
    auto toks = text::tokens(key);
    if (toks.size() != 2 || toks[0] != "run") throw ParseError("sections must be named [run <name>], got [" + key + "]");
    RunSpec run;
    run.name = std::string(toks[1]);
    if (run.name.find_first_of(",\"") != std::string::npos) throw ParseError("run names may not contain ',' or '\"'");
    std::optional<Predicate> pred;
    for (const auto& [k, v] : node) {
      const std::string& val = v.data();
      auto& prm = run.params;
      if (k == "pipeline") {
        run.pipeline = parse_pipeline(text::trim(val));
      } else if (k == "pred") {
        pred = load_predicate(resolve(std::string(text::trim(val))));
      } else if (k == "builtin") {
        std::istringstream line("pred builtin=" + val);
        pred = read_predicate(line);
      } else if (k == "fn") {
        for (auto f : text::split(val, ',')) run.files.push_back(resolve(std::string(text::trim(f))));
      } else if (k == "plant") {
        for (auto f : text::split(val, ';')) run.plant.emplace_back(text::trim(f));
      } else if (k == "n") {
        run.n = static_cast<int>(text::parse_int(val));
      } else if (k == "flip") {
        run.flip = text::parse_double(val);
      } else if (k == "shared") {
        const auto flag = text::trim(val);
        if (flag == "true" || flag == "false") {
          run.shared_noise = flag == "true";
        } else {
          run.shared_noise = text::parse_int(val) != 0;
        }
      } else if (k == "repeat") {
        run.repeat = static_cast<int>(text::parse_int(val));
      } else if (k == "p") {
        run.p = text::parse_double(val);
      } else if (k == "eps") {
        prm.eps = text::parse_double(val);
      } else if (k == "eta") {
        prm.eta = text::parse_double(val);
      } else if (k == "d") {
        prm.d = static_cast<int>(text::parse_int(val));
      } else if (k == "tau") {
        prm.tau = text::parse_double(val);
      } else if (k == "attempts") {
        prm.attempts = static_cast<int>(text::parse_int(val));
      } else if (k == "q") {
        prm.q = parse_rational(val);
      } else if (k == "budget") {
        prm.budget = text::parse_double(val);
      } else if (k == "out") {
        run.out_dir = resolve(std::string(text::trim(val)));
      } else {
        throw ParseError("run " + run.name + ": unknown key '" + k + "'");
      }
    }
    if (run.pipeline == Pipeline::Fractional) {
      if (!(run.p > 0.0 && run.p < 0.5)) throw ParseError("run " + run.name + ": fractional runs need 0 < p < 1/2");
      pred = Predicate(2, 2, {Point{0, 0}, Point{1, 0}, Point{0, 1}}, std::vector<double>{1 - 2 * run.p, run.p, run.p});
    }
    if (!pred) throw ParseError("run " + run.name + ": needs pred= or builtin=");
    run.predicate = std::move(*pred);
    if (run.files.empty() == run.plant.empty()) throw ParseError("run " + run.name + ": give exactly one of fn= and plant=");
    const auto m = static_cast<std::size_t>(run.predicate.arity());
    if ((!run.files.empty() && run.files.size() != m) || (!run.plant.empty() && run.plant.size() != m)) {
      throw ParseError("run " + run.name + ": needs one function per predicate coordinate");
    }
    if (!run.plant.empty() && run.n < 1) throw ParseError("run " + run.name + ": planted runs need n >= 1");
    if (!(run.flip >= 0.0 && run.flip < 0.5)) throw ParseError("run " + run.name + ": flip must lie in [0, 1/2)");
    if (run.repeat < 0) throw ParseError("run " + run.name + ": repeat must be nonnegative");
    for (const auto& f : run.files) {
      if (!std::filesystem::exists(f)) throw ParseError("run " + run.name + ": missing file " + f);
    }
    cfg.runs.push_back(std::move(run));
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_experiment(in, std::filesystem::path(path).parent_path().string());
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  std::vector<ExperimentRow> rows;
  for (const auto& run : config.runs) {
    const auto& P = run.predicate;
    const int s = P.alphabet_size();
    const Codomain cod = s == 2 ? Codomain::Bit : Codomain::Symbol;
    std::vector<FunctionTable> given;
    for (const auto& f : run.files) given.push_back(load_function(f));
    std::vector<FunctionTable> planted;
    for (const auto& spec : run.plant) planted.push_back(make_function(run.n, s, cod, spec));
    const auto run_seed = derive_seed(config.seed, run.name);
    for (int k = 0; k < run.repeat; ++k) {
      ExperimentRow row;
      row.run = run.name;
      row.index = k;
      row.pipeline = run.pipeline;
      row.m = P.arity();
      row.seed = derive_seed(run_seed, static_cast<std::uint64_t>(k));
      row.flip = run.flip;
      try {
        std::vector<FunctionTable> fs;
        if (planted.empty()) {
          fs = given;
          row.violation_before = exact_violation(P, fs, run.params.verify_cap);
        } else {
          auto inst = plant_and_perturb(P, planted, run.flip, row.seed, run.shared_noise, run.params.verify_cap);
          fs = std::move(inst.fs);
          row.violation_before = inst.violation;
        }
        row.n = fs[0].n();
        auto params = run.params;
        params.seed = derive_seed(row.seed, "correct");
        const auto start = std::chrono::steady_clock::now();
        auto result = run_pipeline(run.pipeline, P, fs, params, run.p);
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.violation_after = exact_violation(P, result.gs, run.params.verify_cap);
        row.accepted = result.accepted;
        row.exact = result.exact;
        row.junta_size = static_cast<int>(result.J.size());
        row.distances = result.distances;
        row.eta = result.eta;
        row.attempts = static_cast<int>(result.attempts.size());
        std::string notes;
        for (const auto& note : result.notes) notes += (notes.empty() ? "" : "; ") + note;
        row.notes = notes;
        if (result.accepted && !run.out_dir.empty()) {
          std::filesystem::create_directories(run.out_dir);
          for (std::size_t j = 0; j < result.gs.size(); ++j) {
            save_function((std::filesystem::path(run.out_dir) /
                           (run.name + "-" + std::to_string(k) + "-g" + std::to_string(j + 1) + ".fn"))
                              .string(),
                          result.gs[j]);
          }
        }
      } catch (const Error& e) {
        throw Error("run " + run.name + " #" + std::to_string(k) + ": " + e.what());
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_csv_header(std::ostream& out, bool wall_time) {
  out << "run,index,pipeline,n,m,seed,flip,violation_before,violation_after,accepted,exact,junta_size,"
         "max_distance,distances,eta,attempts";
  if (wall_time) out << ",wall_ms";
  out << ",notes\n";
}

void write_csv_row(std::ostream& out, const ExperimentRow& row, bool wall_time) {
  using text::format_double;
  double max_distance = 0.0;
  std::string distances;
  for (double d : row.distances) {
    max_distance = std::max(max_distance, d);
    if (!distances.empty()) distances += ';';
    distances += format_double(d);
  }
  out << row.run << ',' << row.index << ',' << to_string(row.pipeline) << ',' << row.n << ',' << row.m << ','
      << row.seed << ',' << format_double(row.flip) << ',' << csv_number(row.violation_before) << ','
      << csv_number(row.violation_after) << ',' << (row.accepted ? 1 : 0) << ',' << (row.exact ? 1 : 0) << ','
      << row.junta_size << ',' << format_double(max_distance) << ',' << distances << ','
      << format_double(row.eta) << ',' << row.attempts;
  if (wall_time) out << ',' << format_double(row.wall_ms);
  std::string notes = row.notes;
  std::replace(notes.begin(), notes.end(), '"', '\'');
  out << ",\"" << notes << "\"\n";
}

}  // namespace genpoly
