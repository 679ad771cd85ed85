// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drmdp/average.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/instances.hpp"

namespace drmdp {

/// Which algorithms an experiment runs.
enum class AlgorithmChoice { Reduction, Anchored, Both };

std::string to_string(AlgorithmChoice a);
AlgorithmChoice algorithm_choice_from_string(const std::string& s);

/// Full description of one convergence experiment: instance, ambiguity ball,
/// algorithm selection, sample-size grid and seeds, ground-truth precision,
/// and output locations.
struct ExperimentConfig {
  // Instance.
  std::string family = "hard";  // "hard" | "random"
  HardMdpParams hard{0.25};
  RandomMdpParams random{};

  // Ambiguity ball.
  UncertaintySetSpec spec{Divergence::KL, 0.01, 2.0};

  // Algorithms and grid.
  AlgorithmChoice algorithm = AlgorithmChoice::Both;
  std::vector<long long> n_grid;  // empty selects the default half-decade
                                  // grid {10^2, 10^2.5, ..., 10^5}
  int seeds_per_n = 1;
  std::uint64_t base_seed = 1;

  // Solver knobs.
  double ground_truth_precision = 1e-6;
  double solver_tol = 1e-6;
  int anchor_state = 0;

  // Outputs.
  std::string out_dir = "out";
  bool plot = false;

  /// The n grid actually used (default when n_grid is empty).
  std::vector<long long> effective_n_grid() const;

  /// Builds the benchmark instance this config describes.
  MdpModel build_model() const;

  /// Throws std::invalid_argument on contradictory settings.
  void validate() const;
};

/// One (n, seed, algorithm) run: gain estimate and its l_inf error against
/// the ground-truth gain.
struct ExperimentRecord {
  long long n = 0;
  std::uint64_t seed = 0;
  Method algorithm = Method::Reduction;
  double gain = 0.0;
  double abs_error = 0.0;
  double wall_time_ms = 0.0;
  bool failed = false;       // solver error; gain/abs_error are NaN
  std::string error;         // failure message when failed
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int point_count = 0;
};

/// Runs the full experiment: for each (n, seed) samples an empirical kernel,
/// runs the selected algorithm(s) and records the error against the cached
/// ground-truth gain. Solver failures mark the record failed and the run
/// continues. Deterministic given the config (except wall_time_ms).
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

/// Ordinary least squares of log10(abs_error) on log10(n); failed records
/// and records with non-positive error are excluded. Throws InsufficientData
/// with fewer than two usable points.
RegressionFit fit_loglog(const std::vector<ExperimentRecord>& records);

/// Per-seed record RNG key; exposed so tests can reproduce single records.
std::uint64_t record_seed(std::uint64_t base_seed, long long n, int replicate);

/// Ground-truth gain with a sidecar JSON cache keyed by a content hash of
/// (model, divergence, radius, k, precision). Pass an empty cache_path to
/// bypass the cache.
double cached_ground_truth_gain(const MdpModel& model,
                                const UncertaintySetSpec& spec,
                                double precision,
                                const std::string& cache_path);

/// Serializes records to the experiment CSV (header
/// n,seed,algorithm,gain,abs_error,wall_time_ms; UTF-8; LF line endings).
std::string records_to_csv(const std::vector<ExperimentRecord>& records);

/// Parses records_to_csv output back (used by round-trip tests and external
/// tooling). Throws std::invalid_argument on malformed input.
std::vector<ExperimentRecord> records_from_csv(const std::string& csv);

/// Writes records.csv, regression.json (per-algorithm fits) and, when
/// config.plot is set, convergence.svg under config.out_dir. Returns the list
/// of paths written. IO errors carry the offending path.
std::vector<std::string> emit_outputs(
    const std::vector<ExperimentRecord>& records,
    const std::map<Method, RegressionFit>& fits, const ExperimentConfig& config);

/// Loads an ExperimentConfig from a JSON or TOML file (TOML support covers
/// flat key/value tables with scalars and arrays). Unknown keys are an error.
ExperimentConfig config_from_file(const std::string& path);

/// Parses the flat-TOML subset into dotted-key/value pairs (exposed for
/// tests).
std::map<std::string, std::string> parse_flat_toml(const std::string& text);

}  // namespace drmdp
