#pragma once

#include "adabkb/kernel.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adabkb {

// One per-evaluation record. Values are reported in minimization form; the
// wall clock is cumulative seconds since the start of the repetition and is
// the only field excluded from byte-identity comparisons.
struct TraceRecord {
  int t = 0;
  Vector point;
  double y = 0.0;                       // noisy observation
  std::optional<double> f;              // noiseless value when available
  std::optional<double> regret;         // f - known optimum
  std::optional<double> cum_regret;
  double wall_clock_s = 0.0;
  std::size_t frontier = 0;             // leaf-set (or grid) size
  std::size_t inducing = 0;             // |S_t| (t in exact mode)
  double d_eff = 0.0;
};

enum class RunTermination { Budget, EarlyStop, TimeThreshold };

struct RunTrace {
  std::string algorithm;
  std::string objective;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  RunTermination termination = RunTermination::Budget;
  bool truncated = false;               // stopped by the wall-clock threshold
  std::optional<std::size_t> stop_tau;  // iteration of the early-stop condition
  std::optional<int> stop_t;
  std::size_t max_frontier = 0;         // max leaf-set size over all iterations
  double total_wall_clock_s = 0.0;
  std::optional<double> best_f;         // best (lowest) noiseless value seen
  double best_y = 0.0;                  // best (lowest) noisy value seen
  bool optimum_assumed_zero = false;
  std::optional<std::string> error;     // set when the repetition failed
};

std::string_view to_string(RunTermination t);

nlohmann::ordered_json record_to_json(const TraceRecord& r);
TraceRecord record_from_json(const nlohmann::ordered_json& j);

// JSONL: exactly one record object per line, stable key order, round-trip
// double formatting.
void write_trace_jsonl(const RunTrace& trace, const std::filesystem::path& path);
std::vector<TraceRecord> read_records_jsonl(const std::filesystem::path& path);

// Equality of every record field except the wall clock.
bool records_equal_modulo_time(const std::vector<TraceRecord>& a,
                               const std::vector<TraceRecord>& b);

// Cross-repetition per-step aggregate (mean and 95% normal CI half-width).
struct StepAggregate {
  int t = 0;
  int reps = 0;
  double avg_regret_mean = 0.0;
  double avg_regret_ci95 = 0.0;
  double cum_time_mean_s = 0.0;
  double cum_time_ci95_s = 0.0;
  double frontier_mean = 0.0;
  double inducing_mean = 0.0;
  double d_eff_mean = 0.0;
};

// Aggregates truncate at each step to the repetitions that reached it; the
// CI half-width is 1.96 * sd / sqrt(reps) (0 for a single repetition).
std::vector<StepAggregate> aggregate_traces(const std::vector<RunTrace>& traces);

void write_summary_csv(const std::vector<StepAggregate>& agg,
                       const std::filesystem::path& path);

}  // namespace adabkb
