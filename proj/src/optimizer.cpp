#include "adabkb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adabkb {

void OptimizerConfig::validate() const {
  if (N < 2) {
    throw std::invalid_argument("optimizer: branching factor N must be >= 2");
  }
  if (h_max < 1) {
    throw std::invalid_argument("optimizer: h_max must be >= 1");
  }
  if (budget == 0) {
    throw std::invalid_argument("optimizer: budget must be positive");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("optimizer: lambda must be positive");
  }
  confidence.validate();
}

namespace {
const OptimizerConfig& validated(const OptimizerConfig& config) {
  config.validate();
  return config;
}
}  // namespace

AdaBkbOptimizer::AdaBkbOptimizer(Domain domain, Kernel kernel, OptimizerConfig config)
    : domain_(std::move(domain)),
      config_(validated(config)),
      smoothness_(SmoothnessModel::for_kernel(kernel)),
      geometry_(geometry_constants(domain_, config.N,
                                   std::max(config.h_max, 2 * domain_.dim()))),
      model_(std::move(kernel), config.lambda, config.mode, config.confidence, config.qbar),
      lstar_(-std::numeric_limits<double>::infinity()) {
  vh_.resize(static_cast<std::size_t>(config_.h_max) + 1);
  for (int h = 0; h <= config_.h_max; ++h) {
    vh_[static_cast<std::size_t>(h)] =
        smoothness_.variation_bound(config_.confidence.F, geometry_.v1, geometry_.rho, h);
  }
  LeafEntry root;
  root.cell = root_cell(domain_);
  root.index = std::numeric_limits<double>::infinity();
  root.ucb = std::numeric_limits<double>::infinity();
  leaves_.push_back(std::move(root));
}

double AdaBkbOptimizer::vh(int h) const {
  if (h < 0 || h > config_.h_max) {
    throw std::invalid_argument("vh: depth out of range");
  }
  return vh_[static_cast<std::size_t>(h)];
}

std::optional<double> AdaBkbOptimizer::current_beta() const { return beta_; }

std::size_t AdaBkbOptimizer::select() const {
  if (leaves_.empty()) {
    throw std::logic_error("select: empty leaf set");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < leaves_.size(); ++i) {
    const LeafEntry& a = leaves_[i];
    const LeafEntry& b = leaves_[best];
    if (a.index > b.index) {
      best = i;
    } else if (a.index == b.index && CellId::index_less(a.cell.id, b.cell.id)) {
      best = i;
    }
  }
  return best;
}

double AdaBkbOptimizer::score_ucb(const Vector& x) const {
  const GpPosterior::Prediction p = model_.predict(x);
  return p.mu + *beta_ * p.sigma;
}

void AdaBkbOptimizer::set_entry_index(LeafEntry& e) const {
  const int h = e.cell.id.depth();
  if (h == 0) {
    e.index = e.ucb + vh_[0];
  } else {
    e.index = std::min(e.ucb, e.parent_ucb + vh_[static_cast<std::size_t>(h - 1)]) +
              vh_[static_cast<std::size_t>(h)];
  }
}

bool AdaBkbOptimizer::should_prune(const LeafEntry& e) const {
  const double v = vh_[static_cast<std::size_t>(e.cell.id.depth())];
  return e.ucb + v < lstar_;
}

std::size_t AdaBkbOptimizer::prune_all() {
  const std::size_t before = leaves_.size();
  leaves_.erase(std::remove_if(leaves_.begin(), leaves_.end(),
                               [this](const LeafEntry& e) { return should_prune(e); }),
                leaves_.end());
  return before - leaves_.size();
}

void AdaBkbOptimizer::note_observed(const Vector& x) {
  std::vector<double> key(x.data(), x.data() + x.size());
  auto [it, inserted] = observed_keys_.emplace(std::move(key), observed_points_.size());
  if (inserted) observed_points_.push_back(x);
}

void AdaBkbOptimizer::recompute_lstar() {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& x : observed_points_) {
    const GpPosterior::Prediction p = model_.predict(x);
    best = std::max(best, p.mu - *beta_ * p.sigma);
  }
  lstar_ = best;
}

void AdaBkbOptimizer::refresh_after_evaluation() {
  beta_ = model_.beta();
  recompute_lstar();
  for (LeafEntry& e : leaves_) {
    const GpPosterior::Prediction p = model_.predict(e.cell.centroid());
    e.mu = p.mu;
    e.sigma = p.sigma;
    e.ucb = e.mu + *beta_ * e.sigma;
    if (e.cell.id.depth() > 0) {
      e.parent_ucb = score_ucb(e.parent_centroid);
    }
    set_entry_index(e);
  }
}

bool AdaBkbOptimizer::stop_condition_now() const {
  if (leaves_.empty()) return true;
  return leaves_.size() == 1 && leaves_.front().cell.id.depth() == config_.h_max;
}

void AdaBkbOptimizer::after_iteration_bookkeeping(StepOutcome& outcome) {
  ++tau_;
  outcome.stop_condition = stop_condition_now();
  if (outcome.stop_condition && !stop_tau_) {
    stop_tau_ = tau_;
    stop_t_ = model_.size();
  }
  if (leaves_.empty()) {
    termination_ = Termination::EarlyStop;  // nothing left to select
  } else if (outcome.stop_condition && !config_.continue_after_stop) {
    termination_ = Termination::EarlyStop;
  }
  if (model_.size() >= config_.budget && termination_ == Termination::Running) {
    termination_ = Termination::Budget;
  }
}

StepOutcome AdaBkbOptimizer::step(const std::function<double(const Vector&)>& evaluate,
                                  std::mt19937_64& rng) {
  if (terminated()) {
    throw std::logic_error("step: optimizer already terminated");
  }
  const std::size_t sel = select();
  const LeafEntry chosen = leaves_[sel];
  const int h = chosen.cell.id.depth();

  StepOutcome outcome;
  outcome.cell = chosen.cell.id;
  outcome.point = chosen.cell.centroid();

  const bool expandable =
      beta_.has_value() && h < config_.h_max && *beta_ * chosen.sigma <= vh_[static_cast<std::size_t>(h)];

  if (expandable) {
    // Refinement: the model is untouched; only the new children are scored,
    // against the same snapshot the rest of the leaf set was scored with.
    outcome.kind = StepKind::Expanded;
    std::vector<Cell> kids = children(chosen.cell, config_.N);
    leaves_.erase(leaves_.begin() + static_cast<std::ptrdiff_t>(sel));
    std::vector<LeafEntry> fresh;
    fresh.reserve(kids.size());
    for (Cell& kid : kids) {
      LeafEntry e;
      e.cell = std::move(kid);
      e.parent_centroid = outcome.point;
      const GpPosterior::Prediction p = model_.predict(e.cell.centroid());
      e.mu = p.mu;
      e.sigma = p.sigma;
      e.ucb = e.mu + *beta_ * e.sigma;
      e.parent_ucb = chosen.ucb;
      set_entry_index(e);
      if (!should_prune(e)) {
        fresh.push_back(std::move(e));
      } else {
        ++outcome.pruned;
      }
    }
    leaves_.insert(leaves_.end(), std::make_move_iterator(fresh.begin()),
                   std::make_move_iterator(fresh.end()));
  } else {
    outcome.kind = StepKind::Evaluated;
    const double y = evaluate(outcome.point);
    model_.append_observation(outcome.point, y, rng);
    outcome.value = y;
    note_observed(outcome.point);
    refresh_after_evaluation();
    outcome.pruned = prune_all();
  }

  after_iteration_bookkeeping(outcome);
  return outcome;
}

}  // namespace adabkb
