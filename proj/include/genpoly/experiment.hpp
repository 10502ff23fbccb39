#pragma once

// Planted instances and seeded batch runs of the correction pipelines.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genpoly/corrector.hpp"
#include "genpoly/funcspace.hpp"
#include "genpoly/predicates.hpp"

namespace genpoly {

struct PlantedInstance {
  std::vector<FunctionTable> exact;
  std::vector<FunctionTable> fs;
  /// Fraction of inputs changed per function.
  std::vector<double> changed;
  /// Exact violation of fs; empty when over the cap.
  std::optional<double> violation;
};

/// Changes each output of each planted function independently with
/// probability `flip`: bits flip, larger alphabets move to a uniform other
/// symbol. With `shared_noise`, equal planted functions receive equal noise.
/// Throws ValidationError when the planted functions are not an exact
/// generalized polymorphism of P.
PlantedInstance plant_and_perturb(const Predicate& P, std::vector<FunctionTable> exact, double flip,
                                  std::uint64_t seed, bool shared_noise = false, Index cap = kDefaultViolationCap);

enum class Pipeline { Monotone, General, Alphabet, Fractional };
std::string_view to_string(Pipeline p);
Pipeline parse_pipeline(std::string_view text);

/// Dispatches to the pipeline; `p` is the NAND bias for the fractional one.
CorrectionResult run_pipeline(Pipeline pipeline, const Predicate& P, std::span<const FunctionTable> fs,
                              const CorrectionParams& params, double p = 0.0);

struct RunSpec {
  std::string name;
  Pipeline pipeline = Pipeline::Monotone;
  Predicate predicate = builtin::full(1, 2);
  /// Function files; when empty the functions are planted.
  std::vector<std::string> files;
  /// One constructor line per coordinate (see make_function).
  std::vector<std::string> plant;
  int n = 0;
  double flip = 0.0;
  bool shared_noise = false;
  int repeat = 1;
  double p = 0.0;
  CorrectionParams params;
  /// Directory for accepted outputs; empty to skip.
  std::string out_dir;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<RunSpec> runs;
};

// INI format: a root "seed = <u64>" and one [run <name>] section per run,
// in execution order, with keys
//   pipeline pred (file) | builtin (e.g. "nand m=2") fn (comma list)
//   plant ("dictator i=1; dictator i=1") n flip shared repeat p
//   eps eta d tau attempts q budget out
// Paths are relative to the config file.
ExperimentConfig read_experiment(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_experiment(const std::string& path);

struct ExperimentRow {
  std::string run;
  int index = 0;
  Pipeline pipeline = Pipeline::Monotone;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  double flip = 0.0;
  std::optional<double> violation_before;
  std::optional<double> violation_after;
  bool accepted = false;
  bool exact = false;
  int junta_size = 0;
  std::vector<double> distances;
  double eta = 0.0;
  int attempts = 0;
  double wall_ms = 0.0;
  std::string notes;
};

/// Rows in config order; run `r`, repeat `k` uses derive_seed(derive_seed(seed, name), k).
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_csv_header(std::ostream& out, bool wall_time = false);
void write_csv_row(std::ostream& out, const ExperimentRow& row, bool wall_time = false);

}  // namespace genpoly
