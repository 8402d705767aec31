#pragma once

#include "adabkb/kernel.hpp"
#include "adabkb/partition.hpp"
#include "adabkb/posterior.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace adabkb {

struct OptimizerConfig {
  int N = 3;
  int h_max = 5;
  std::size_t budget = 100;
  bool continue_after_stop = false;
  PosteriorMode mode = PosteriorMode::Sketched;
  double lambda = 0.01;
  ConfidenceParams confidence;
  QbarRule qbar;

  void validate() const;
};

// Leaf-set entry: a frontier cell with posterior statistics at its centroid
// under the model snapshot of the last evaluation. The optimistic index is
//   I = min(ucb, parent_ucb + V_{h-1}) + V_h
// (root: ucb + V_0), where parent_ucb is the same-snapshot confidence bound
// at the parent centroid.
struct LeafEntry {
  Cell cell;
  Vector parent_centroid;  // empty for the root cell
  double mu = 0.0;
  double sigma = 0.0;
  double ucb = 0.0;
  double parent_ucb = 0.0;
  double index = 0.0;
};

enum class StepKind { Evaluated, Expanded };

struct StepOutcome {
  StepKind kind = StepKind::Evaluated;
  CellId cell;
  Vector point;                     // selected centroid
  std::optional<double> value;      // noisy value, evaluation steps only
  std::size_t pruned = 0;           // entries removed this iteration
  bool stop_condition = false;      // early-stop condition held afterwards
};

enum class Termination { Running, Budget, EarlyStop };

// Adaptive-discretization optimistic optimizer (maximization). One step is
// one loop iteration: either the selected leaf is expanded (model untouched,
// only the new children scored) or its centroid is evaluated (model updated,
// the whole leaf set re-scored). Pruning runs after either branch against
// the best lower confidence bound over observed centroids.
class AdaBkbOptimizer {
public:
  AdaBkbOptimizer(Domain domain, Kernel kernel, OptimizerConfig config);

  // pre: !terminated(). evaluate returns the noisy (maximization-form) value
  // at a centroid; rng drives inducing-set resampling only.
  StepOutcome step(const std::function<double(const Vector&)>& evaluate,
                   std::mt19937_64& rng);

  bool terminated() const { return termination_ != Termination::Running; }
  Termination termination() const { return termination_; }
  std::size_t t() const { return model_.size(); }
  std::size_t tau() const { return tau_; }
  std::optional<std::size_t> stop_condition_tau() const { return stop_tau_; }
  std::optional<std::size_t> stop_condition_t() const { return stop_t_; }

  const std::vector<LeafEntry>& leaves() const { return leaves_; }
  const GpPosterior& model() const { return model_; }
  const GeometryConstants& geometry() const { return geometry_; }
  const OptimizerConfig& config() const { return config_; }
  double vh(int h) const;
  // Confidence radius of the current snapshot; undefined before the first
  // evaluation.
  std::optional<double> current_beta() const;
  // Best lower confidence bound over observed centroids (-inf before the
  // first evaluation).
  double lstar() const { return lstar_; }

  // Index of the entry the next step would act on (tie-break: higher index,
  // then smaller depth, then smaller id).
  std::size_t select() const;

  // True when the leaf set is empty or has shrunk to a single deepest-level
  // cell (whose centroid every further evaluation would target).
  bool stop_condition_now() const;

private:
  void refresh_after_evaluation();
  double score_ucb(const Vector& x) const;
  void set_entry_index(LeafEntry& e) const;
  std::size_t prune_all();
  bool should_prune(const LeafEntry& e) const;
  void note_observed(const Vector& x);
  void recompute_lstar();
  void after_iteration_bookkeeping(StepOutcome& outcome);

  Domain domain_;
  OptimizerConfig config_;
  SmoothnessModel smoothness_;
  GeometryConstants geometry_;
  std::vector<double> vh_;
  GpPosterior model_;

  std::vector<LeafEntry> leaves_;
  std::optional<double> beta_;
  double lstar_;
  std::size_t tau_ = 0;
  Termination termination_ = Termination::Running;
  std::optional<std::size_t> stop_tau_;
  std::optional<std::size_t> stop_t_;

  // Distinct observed centroids (keyed by exact coordinates) for l*.
  std::map<std::vector<double>, std::size_t> observed_keys_;
  std::vector<Vector> observed_points_;
};

}  // namespace adabkb
