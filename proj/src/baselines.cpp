#include "adabkb/baselines.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace adabkb {

Grid build_cartesian_grid(const Domain& domain, int points_per_dim,
                          std::size_t size_cap) {
  if (points_per_dim < 2) {
    throw std::invalid_argument("cartesian grid needs at least 2 points per dimension");
  }
  const auto p = static_cast<std::size_t>(domain.dim());
  std::size_t total = 1;
  for (std::size_t d = 0; d < p; ++d) {
    if (total > size_cap / static_cast<std::size_t>(points_per_dim)) {
      throw std::invalid_argument("cartesian grid of " + std::to_string(points_per_dim) +
                                  "^" + std::to_string(p) + " points exceeds the cap of " +
                                  std::to_string(size_cap));
    }
    total *= static_cast<std::size_t>(points_per_dim);
  }

  // Precompute the per-dimension coordinate ladders, endpoints included.
  std::vector<std::vector<double>> axes(p);
  for (std::size_t d = 0; d < p; ++d) {
    axes[d].resize(static_cast<std::size_t>(points_per_dim));
    const double lo = domain.lo[static_cast<Eigen::Index>(d)];
    const double hi = domain.hi[static_cast<Eigen::Index>(d)];
    for (int i = 0; i < points_per_dim; ++i) {
      axes[d][static_cast<std::size_t>(i)] =
          (i == points_per_dim - 1)
              ? hi
              : lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(points_per_dim - 1);
    }
  }

  Grid grid;
  grid.kind = GridKind::Cartesian;
  grid.points_per_dim = points_per_dim;
  grid.points.reserve(total);
  // Odometer enumeration: the last dimension varies fastest.
  std::vector<int> digits(p, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector x(static_cast<Eigen::Index>(p));
    for (std::size_t d = 0; d < p; ++d) {
      x[static_cast<Eigen::Index>(d)] = axes[d][static_cast<std::size_t>(digits[d])];
    }
    grid.points.push_back(std::move(x));
    for (std::size_t d = p; d-- > 0;) {
      if (++digits[d] < points_per_dim) break;
      digits[d] = 0;
    }
  }
  return grid;
}

Grid build_random_grid(const Domain& domain, std::size_t count, std::uint64_t seed,
                       std::size_t size_cap) {
  if (count < 1) {
    throw std::invalid_argument("random grid needs at least one point");
  }
  if (count > size_cap) {
    throw std::invalid_argument("random grid of " + std::to_string(count) +
                                " points exceeds the cap of " + std::to_string(size_cap));
  }
  const auto p = static_cast<std::size_t>(domain.dim());
  std::mt19937_64 rng(seed);
  Grid grid;
  grid.kind = GridKind::Random;
  grid.sample_count = count;
  grid.seed = seed;
  grid.points.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Vector x(static_cast<Eigen::Index>(p));
    for (std::size_t d = 0; d < p; ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      x[di] = domain.lo[di] + (domain.hi[di] - domain.lo[di]) * uniform53(rng);
    }
    grid.points.push_back(std::move(x));
  }
  return grid;
}

GridUcbOptimizer::GridUcbOptimizer(Grid grid, const Kernel& kernel, PosteriorMode mode,
                                   double lambda, ConfidenceParams confidence,
                                   QbarRule qbar)
    : grid_(std::move(grid)), model_(kernel, lambda, mode, confidence, qbar) {
  if (grid_.points.empty()) {
    throw std::invalid_argument("grid must contain at least one point");
  }
}

std::size_t GridUcbOptimizer::select() const {
  if (model_.size() == 0) return 0;
  const double beta = model_.beta();
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_.points.size(); ++i) {
    const GpPosterior::Prediction pred = model_.predict(grid_.points[i]);
    const double score = pred.mu + beta * pred.sigma;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

GridStep GridUcbOptimizer::step(const std::function<double(const Vector&)>& evaluate,
                                std::mt19937_64& rng) {
  GridStep out;
  out.point_index = select();
  out.point = grid_.points[out.point_index];
  out.value = evaluate(out.point);
  model_.append_observation(out.point, out.value, rng);
  return out;
}

}  // namespace adabkb
