#include "adabkb/posterior.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adabkb {

namespace {
// Relative eigenvalue cutoff for the pseudo-inverse of the inducing Gram.
constexpr double kPinvRelTol = 1e-10;
}  // namespace

void ConfidenceParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("confidence: delta must lie in (0,1)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("confidence: epsilon must lie in (0,1)");
  }
  if (!(F > 0.0)) {
    throw std::invalid_argument("confidence: F must be positive");
  }
  if (beta_lambda_exponent != 1 && beta_lambda_exponent != 2) {
    throw std::invalid_argument("confidence: beta lambda exponent must be 1 or 2");
  }
}

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian01(std::mt19937_64& rng) {
  // Box-Muller; u is nudged away from 0 so the log stays finite.
  const double u = std::max(uniform53(rng), 0x1.0p-53);
  const double v = uniform53(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

GpPosterior::GpPosterior(Kernel kernel, double lambda, PosteriorMode mode,
                         ConfidenceParams confidence, QbarRule qbar)
    : kernel_(std::move(kernel)),
      lambda_(lambda),
      mode_(mode),
      confidence_(confidence),
      qbar_(qbar) {
  if (!(lambda_ > 0.0)) {
    throw std::invalid_argument("posterior: lambda must be positive");
  }
  confidence_.validate();
  if (!qbar_.automatic && !(qbar_.value > 0.0)) {
    throw std::invalid_argument("posterior: constant qbar must be positive");
  }
}

GpPosterior::Prediction GpPosterior::predict(const Vector& x) const {
  if (xs_.empty()) {
    Prediction p;
    p.mu = 0.0;
    p.sigma = std::sqrt(kernel_.diag() / lambda_);
    return p;
  }
  return mode_ == PosteriorMode::Exact ? predict_exact(x) : predict_sketched(x);
}

GpPosterior::Prediction GpPosterior::predict_exact(const Vector& x) const {
  const Vector kx = kernel_.cross(xs_, x);
  const Vector v = chol_.triangularView<Eigen::Lower>().solve(kx);
  Prediction p;
  p.mu = kx.dot(weights_);
  const double var = (kernel_.diag() - v.squaredNorm()) / lambda_;
  p.sigma = std::sqrt(std::max(0.0, var));
  return p;
}

GpPosterior::Prediction GpPosterior::predict_sketched(const Vector& x) const {
  if (inducing_.empty()) {
    throw std::logic_error("posterior: sketched prediction with an empty inducing set");
  }
  const Vector z = proj_ * kernel_.cross(anchors_, x);

  Prediction p;
  p.mu = z.dot(sketch_weights_);
  // sigma^2 = (k(x,x) - ||z||^2)/lambda + z^T A^{-1} z; both parts are
  // non-negative up to rounding and are clamped separately.
  const double outside = std::max(0.0, (kernel_.diag() - z.squaredNorm()) / lambda_);
  const double inside = z.dot(a_llt_.solve(z));
  p.sigma = std::sqrt(outside + std::max(0.0, inside));
  return p;
}

double GpPosterior::nystrom_kernel(const Vector& a, const Vector& b) const {
  if (mode_ != PosteriorMode::Sketched) {
    throw std::logic_error("nystrom_kernel: model is not in sketched mode");
  }
  if (inducing_.empty()) {
    throw std::logic_error("nystrom_kernel: empty inducing set");
  }
  const Vector za = proj_ * kernel_.cross(anchors_, a);
  const Vector zb = proj_ * kernel_.cross(anchors_, b);
  return za.dot(zb);
}

void GpPosterior::append_observation(const Vector& x, double y, std::mt19937_64& rng) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("append_observation: non-finite observation value");
  }
  // Selection-time variances under the pre-append model: one per existing
  // point (resampling inputs) plus the new point (history entry).
  prev_variances_.clear();
  prev_variances_.reserve(xs_.size() + 1);
  for (const Vector& xi : xs_) {
    const Prediction p = predict(xi);
    prev_variances_.push_back(p.sigma * p.sigma);
  }
  const Prediction at_new = predict(x);
  prev_variances_.push_back(at_new.sigma * at_new.sigma);

  xs_.push_back(x);
  ys_.push_back(y);
  variance_history_.push_back(at_new.sigma * at_new.sigma);

  if (mode_ == PosteriorMode::Exact) {
    append_exact_factor(x);
  } else {
    resparsify(rng);
  }
  refresh_zeta_sum();
}

void GpPosterior::resparsify(std::mt19937_64& rng) {
  if (mode_ != PosteriorMode::Sketched) {
    throw std::logic_error("resparsify: model is not in sketched mode");
  }
  const std::size_t t = xs_.size();
  if (t == 0) {
    throw std::logic_error("resparsify: no observations");
  }
  if (prev_variances_.size() != t) {
    throw std::logic_error("resparsify: stale variance snapshot");
  }
  const double qbar = qbar_now();
  last_probs_.assign(t, 0.0);
  inducing_.clear();
  // One uniform per pre-existing point, consumed in index order; the newest
  // point is always included and consumes no draw.
  for (std::size_t i = 0; i + 1 < t; ++i) {
    const double p = std::min(qbar * prev_variances_[i], 1.0);
    last_probs_[i] = p;
    if (uniform53(rng) < p) inducing_.push_back(i);
  }
  last_probs_[t - 1] = 1.0;
  inducing_.push_back(t - 1);
  rebuild_sketch();
}

void GpPosterior::append_exact_factor(const Vector& x) {
  const Eigen::Index t = static_cast<Eigen::Index>(xs_.size());
  if (t == 1) {
    chol_.resize(1, 1);
    chol_(0, 0) = std::sqrt(kernel_.diag() + lambda_);
  } else {
    // Grow the Cholesky factor of (K + lambda I) by one row.
    std::vector<Vector> old(xs_.begin(), xs_.end() - 1);
    const Vector kx = kernel_.cross(old, x);
    const Vector b = chol_.topLeftCorner(t - 1, t - 1)
                         .triangularView<Eigen::Lower>()
                         .solve(kx);
    const double d2 = kernel_.diag() + lambda_ - b.squaredNorm();
    if (!(d2 > 0.0)) {
      throw std::runtime_error("posterior: Cholesky append lost positive definiteness");
    }
    Matrix grown = Matrix::Zero(t, t);
    grown.topLeftCorner(t - 1, t - 1) = chol_.topLeftCorner(t - 1, t - 1);
    grown.row(t - 1).head(t - 1) = b.transpose();
    grown(t - 1, t - 1) = std::sqrt(d2);
    chol_ = std::move(grown);
  }
  const Vector y = Eigen::Map<const Vector>(ys_.data(), t);
  weights_ = chol_.triangularView<Eigen::Lower>().transpose().solve(
      chol_.triangularView<Eigen::Lower>().solve(y));
}

void GpPosterior::rebuild_sketch() {
  anchors_.clear();
  anchors_.reserve(inducing_.size());
  for (std::size_t idx : inducing_) anchors_.push_back(xs_[idx]);
  const Matrix ks = kernel_.gram(anchors_);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(ks);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("posterior: inducing Gram eigendecomposition failed");
  }
  const Vector evals = eig.eigenvalues();
  const double cutoff = kPinvRelTol * std::max(evals.maxCoeff(), 0.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] > cutoff && evals[i] > 0.0) kept.push_back(i);
  }
  if (kept.empty()) {
    throw std::runtime_error("posterior: inducing Gram is numerically zero");
  }
  proj_.resize(static_cast<Eigen::Index>(kept.size()), ks.rows());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    proj_.row(static_cast<Eigen::Index>(r)) =
        eig.eigenvectors().col(kept[r]).transpose() / std::sqrt(evals[kept[r]]);
  }

  const Eigen::Index t = static_cast<Eigen::Index>(xs_.size());
  const Eigen::Index r = proj_.rows();
  embedded_.resize(t, r);
  for (Eigen::Index i = 0; i < t; ++i) {
    embedded_.row(i) =
        (proj_ * kernel_.cross(anchors_, xs_[static_cast<std::size_t>(i)])).transpose();
  }
  Matrix a = embedded_.transpose() * embedded_;
  a.diagonal().array() += lambda_;
  a_llt_.compute(a);
  if (a_llt_.info() != Eigen::Success) {
    throw std::runtime_error("posterior: embedded-space factorization failed");
  }
  const Vector y = Eigen::Map<const Vector>(ys_.data(), t);
  sketch_weights_ = a_llt_.solve(embedded_.transpose() * y);
}

void GpPosterior::refresh_zeta_sum() {
  double sum = 0.0;
  if (mode_ == PosteriorMode::Exact) {
    // Batch: sigma^2(x_s) = (K_ss - ||L^{-1} K col s||^2) / lambda.
    const Eigen::Index t = static_cast<Eigen::Index>(xs_.size());
    const Matrix k = kernel_.gram(xs_);
    const Matrix v = chol_.triangularView<Eigen::Lower>().solve(k);
    for (Eigen::Index s = 0; s < t; ++s) {
      sum += std::max(0.0, (k(s, s) - v.col(s).squaredNorm()) / lambda_);
    }
  } else {
    // The embedded rows are exactly the z(x_s) used by predictions, so the
    // per-point variances batch into one solve.
    const Matrix v = a_llt_.solve(embedded_.transpose());
    for (Eigen::Index s = 0; s < embedded_.rows(); ++s) {
      const double outside =
          std::max(0.0, (kernel_.diag() - embedded_.row(s).squaredNorm()) / lambda_);
      const double inside = std::max(0.0, embedded_.row(s).dot(v.col(s)));
      sum += outside + inside;
    }
  }
  zeta_sum_ = sum;
}

double GpPosterior::qbar_now() const {
  if (!qbar_.automatic) return qbar_.value;
  const double kappa = kernel_.kappa();
  return confidence_.alpha_bar() *
         std::log(kappa * kappa * static_cast<double>(xs_.size()));
}

double GpPosterior::beta() const {
  const std::size_t t = xs_.size();
  if (t == 0) {
    throw std::logic_error("beta: undefined before the first observation");
  }
  const double kappa = kernel_.kappa();
  const double zeta =
      confidence_.alpha_bar() * std::log(kappa * kappa * static_cast<double>(t)) * zeta_sum_;
  const double lead =
      2.0 * std::pow(lambda_, confidence_.beta_lambda_exponent) *
      std::sqrt(zeta + std::log(1.0 / confidence_.delta));
  const double tail =
      (1.0 + 1.0 / std::sqrt(1.0 - confidence_.epsilon)) * std::sqrt(lambda_) * confidence_.F;
  return lead + tail;
}

double GpPosterior::effective_dimension() const {
  return std::accumulate(variance_history_.begin(), variance_history_.end(), 0.0);
}

std::vector<std::size_t> GpPosterior::inducing_indices() const {
  if (mode_ == PosteriorMode::Exact) {
    std::vector<std::size_t> all(xs_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  return inducing_;
}

std::size_t GpPosterior::inducing_size() const {
  return mode_ == PosteriorMode::Exact ? xs_.size() : inducing_.size();
}

}  // namespace adabkb
