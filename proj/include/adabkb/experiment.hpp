#pragma once

#include "adabkb/baselines.hpp"
#include "adabkb/objectives.hpp"
#include "adabkb/optimizer.hpp"
#include "adabkb/trace.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adabkb {

enum class Algorithm { AdaBkb, AdaGpExact, GpUcb, Bkb, RandomBkb };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);

// Salt separating the resampling stream from the noise stream so that exact
// and sketched runs with the same seed consume identical noise sequences.
inline constexpr std::uint64_t kResampleStreamSalt = 0x9E3779B97F4A7C15ull;
// Salt for the per-repetition random-grid draw of the random-grid baseline.
inline constexpr std::uint64_t kGridStreamSalt = 0xC2B2AE3D27D4EB4Full;

// Experiment request as parsed from flags or a config file. Zero/empty
// sentinel fields mean "not set"; resolve() fills them from the objective
// registry or the documented fallbacks.
struct RunConfig {
  Algorithm algorithm = Algorithm::AdaBkb;
  std::string objective;             // registry name (exclusive with external_cmd)
  std::string external_cmd;          // shell command for an external objective
  std::vector<std::pair<double, double>> external_domain;  // per-dim [lo, hi]
  std::optional<double> known_optimum;                     // external only
  bool assume_zero_optimum = false;                        // external only

  std::size_t budget = 100;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;

  std::vector<double> lengthscales;  // empty = registry default; 1 = isotropic
  double lambda = 0.01;
  double noise_sigma = -1.0;         // < 0 = unset (0.01 registry, 0 external)
  double F = 1.0;
  double delta = 1e-5;
  double epsilon = 0.5;
  int N = 0;                         // 0 = unset
  int h_max = 0;                     // 0 = unset
  std::optional<double> qbar;        // unset = automatic rule
  int grid_points_per_dim = 0;       // 0 = unset (by dimension)
  std::size_t random_grid_size = 0;  // 0 = unset (= budget)
  double time_threshold_secs = 600.0;
  double external_timeout_secs = 60.0;
  bool continue_after_stop = false;
  std::string out = "runs";
};

// Flat JSON object with exactly the RunConfig fields; unknown keys are
// rejected. Omitted keys keep their defaults.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_json(const std::string& text);

// Fully resolved experiment: defaults applied and validated against the
// objective. The registry objective (when used) is borrowed from the static
// registry.
struct ResolvedExperiment {
  RunConfig config;                  // normalized copy
  std::string objective_label;
  Domain domain;
  Kernel kernel = Kernel::gaussian(1.0);
  NoiseModel noise;
  std::optional<double> known_optimum;
  bool optimum_assumed_zero = false;
  const Objective* registry_objective = nullptr;  // null for external commands
  std::vector<std::string> warnings;

  OptimizerConfig optimizer_config() const;
  ConfidenceParams confidence() const;
  QbarRule qbar_rule() const;
};

ResolvedExperiment resolve(const RunConfig& config);

// Normalized-config echo (the exact values a run would use), suitable for
// validate-config output and the run summary header.
nlohmann::ordered_json describe(const ResolvedExperiment& exp);

// One repetition with the given seed. Objective evaluations are reported in
// minimization form; the wall-clock threshold truncates the run. Errors
// (external-protocol failures and the like) are captured on the trace rather
// than thrown.
RunTrace run_single(const ResolvedExperiment& exp, std::uint64_t seed);

struct ExperimentResult {
  ResolvedExperiment setup;
  std::vector<RunTrace> traces;           // one per repetition, seeds seed+i
  std::vector<StepAggregate> aggregate;   // over non-failed repetitions
};

ExperimentResult run_experiment(const ResolvedExperiment& exp);

// Writes trace_rep<i>.jsonl per repetition plus summary.csv and summary.json
// under out_dir (created if missing); returns the paths written.
std::vector<std::filesystem::path> write_experiment_outputs(
    const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace adabkb
