#pragma once

#include "adabkb/partition.hpp"

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace adabkb {

// Benchmark objective in minimization form: the optimizer maximizes the
// negated value and reports are converted back.
struct Objective {
  std::string name;
  Domain domain;
  std::function<double(const Vector&)> fn;
  std::optional<double> known_optimum;  // known minimum value
  std::optional<Vector> minimizer;      // one known argmin (reporting only)

  double operator()(const Vector& x) const { return fn(x); }
};

// Per-objective optimizer defaults (kernel lengthscale, tree depth cap,
// branching factor) applied when the caller does not override them.
struct RegistryDefaults {
  double lengthscale = 1.0;
  int h_max = 5;
  int N = 3;
};

const std::vector<Objective>& objective_registry();
const Objective* find_objective(std::string_view name);
std::optional<RegistryDefaults> registry_defaults(std::string_view name);

// Grid resolution convention for the fixed-grid baselines: 15 points per
// dimension up to 4 dimensions, 10 for 5-6 dimensions, 5 above.
int default_grid_points_per_dim(int dim);

// Additive observation noise. The sigma of the Gaussian kind doubles as the
// sub-Gaussian scale the confidence machinery assumes.
struct NoiseModel {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::Gaussian;
  double sigma = 0.01;

  static NoiseModel none() { return NoiseModel{Kind::None, 0.0}; }
  static NoiseModel gaussian(double sigma);

  // 0 for the None kind; Gaussian consumes two engine draws per sample.
  double sample(std::mt19937_64& rng) const;
};

}  // namespace adabkb
