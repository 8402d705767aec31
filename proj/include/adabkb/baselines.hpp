#pragma once

#include "adabkb/partition.hpp"
#include "adabkb/posterior.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace adabkb {

enum class GridKind { Cartesian, Random };

// Finite candidate set for the fixed-discretization baselines.
struct Grid {
  GridKind kind = GridKind::Cartesian;
  std::vector<Vector> points;
  int points_per_dim = 0;        // cartesian grids
  std::size_t sample_count = 0;  // random grids
  std::uint64_t seed = 0;        // random grids
};

// Default ceiling on candidate-set size; larger requests are config errors.
inline constexpr std::size_t kGridSizeCap = 1000000;

// Evenly spaced inclusive grid per dimension, Cartesian product.
// pre: points_per_dim >= 2; product size within size_cap.
Grid build_cartesian_grid(const Domain& domain, int points_per_dim,
                          std::size_t size_cap = kGridSizeCap);

// count i.i.d. uniform points over the box, reproducible from the seed.
// pre: count >= 1 and within size_cap.
Grid build_random_grid(const Domain& domain, std::size_t count, std::uint64_t seed,
                       std::size_t size_cap = kGridSizeCap);

struct GridStep {
  std::size_t point_index = 0;
  Vector point;
  double value = 0.0;
};

// Fixed-candidate confidence-bound loop (maximization) sharing the posterior
// machinery with the adaptive optimizer: each step scores every grid point
// under the current model, picks the argmax of mu + beta * sigma with ties
// broken by grid order, queries it, and updates the model. The first step,
// where beta is not yet defined and all candidates look alike, takes the
// first grid point. Exact mode is the classic grid algorithm; sketched mode
// is its budgeted variant.
class GridUcbOptimizer {
public:
  GridUcbOptimizer(Grid grid, const Kernel& kernel, PosteriorMode mode, double lambda,
                   ConfidenceParams confidence, QbarRule qbar = {});

  // Index (into grid().points) of the candidate the next step would query.
  std::size_t select() const;

  // pre: none beyond construction. evaluate returns the noisy
  // (maximization-form) value; rng drives inducing-set resampling only.
  GridStep step(const std::function<double(const Vector&)>& evaluate,
                std::mt19937_64& rng);

  std::size_t t() const { return model_.size(); }
  const Grid& grid() const { return grid_; }
  const GpPosterior& model() const { return model_; }

private:
  Grid grid_;
  GpPosterior model_;
};

}  // namespace adabkb
