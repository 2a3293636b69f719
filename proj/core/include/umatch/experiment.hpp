#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "umatch/eval.hpp"
#include "umatch/generators.hpp"
#include "umatch/reconcile.hpp"

namespace umatch {

inline constexpr int kConfigSchemaVersion = 1;

struct GeneratorSpec {
  /// er | pa | rmat | affiliation | file
  std::string model = "pa";
  std::size_t n = 20000;
  std::size_t m = 20;
  double p = 0.01;
  RmatParams rmat;
  std::size_t users = 10000;
  std::size_t interests = 1000;
  std::size_t per_user = 4;
  /// Edge-list path for model "file".
  std::string path;
};

struct PerturbationSpec {
  /// independent | cascade | affiliation
  std::string model = "independent";
  double s1 = 0.5;
  double s2 = 0.5;
  bool permute = true;
  /// Cascade activation probability.
  double p = 0.05;
  /// Cascade starts are resampled until at least this many nodes activate.
  std::size_t min_activated = 1;
  std::size_t max_start_attempts = 100;
  /// Fixed cascade start for both copies; random per copy when absent.
  std::optional<NodeId> start;
  /// Interest deletion probability for the affiliation model.
  double q = 0.25;
  /// Sybil attachment probability; no sybils when absent.
  std::optional<double> sybil_attach_prob;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  GeneratorSpec generator;
  PerturbationSpec perturbation;
  double seed_link_prob = 0.1;
  std::vector<std::uint32_t> thresholds{3};
  std::uint32_t iterations = 2;
  std::uint32_t degree_cap = 0;
  bool strict_threshold = false;
  /// Also run the unbucketed baseline for every threshold.
  bool ablation = false;
  std::size_t repetitions = 1;
  std::uint64_t master_seed = 1;
  /// Reconcile workers per repetition.
  unsigned workers = 1;
  /// Repetitions processed concurrently.
  unsigned parallel_repetitions = 1;
  /// Artifacts are written only when non-empty.
  std::string output_dir;
};

/// Throws ParameterError on out-of-range values or unknown model names.
void validate(const ExperimentConfig& cfg);

/// Parses the JSON config. A manifest written by run_experiment is accepted
/// too (its embedded "config" object is used).
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& cfg);

struct PhaseTimes {
  double generate = 0;
  double perturb = 0;
  double seeds = 0;
  double reconcile = 0;
  double evaluate = 0;
};

struct ReportRow {
  std::size_t repetition = 0;
  std::uint64_t repetition_seed = 0;
  /// "bucketed" or "baseline".
  std::string algorithm;
  std::uint32_t threshold = 0;
  std::uint32_t iterations = 0;
  Metrics metrics;
  DegreeBreakdown breakdown;
  std::string breakdown_file;
  PhaseTimes times;
  std::uint64_t peak_candidates = 0;
  /// Non-empty when the repetition failed.
  std::string error;
};

struct ExperimentReport {
  /// Ordered by repetition, then threshold, then algorithm (bucketed first).
  std::vector<ReportRow> rows;
  std::vector<std::uint64_t> repetition_seeds;

  bool any_failed() const;
  void write_csv(std::ostream& out) const;
};

/// Per-repetition seeds: consecutive outputs of splitmix64(master_seed).
std::vector<std::uint64_t> repetition_seeds(std::uint64_t master_seed, std::size_t repetitions);

/// generate -> perturb -> sample seeds -> reconcile (each threshold, plus
/// baseline under ablation) -> evaluate, once per repetition.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct BenchConfig {
  std::vector<unsigned> scales;
  RmatParams rmat;  // scale is overridden per entry
  double survival = 0.5;
  double seed_link_prob = 0.1;
  std::uint32_t threshold = 3;
  std::uint32_t iterations = 1;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
};

struct BenchRow {
  unsigned scale = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  PhaseTimes times;
  double seconds = 0;
  /// seconds / seconds of the first row.
  double relative = 0;
  std::uint64_t output = 0;
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Times the full pipeline on one RMAT graph per scale entry. Needs at least
/// two entries; an allocation failure is reported as BenchError naming the
/// scale.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace umatch
