#pragma once

#include "adabkb/kernel.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace adabkb {

// Confidence-radius parameters. beta_lambda_exponent selects the power of the
// ridge in the leading term (2 as printed, 1 as the dimensionally consistent
// alternative); both are supported, 2 is the default.
struct ConfidenceParams {
  double delta = 1e-5;
  double epsilon = 0.5;
  double F = 1.0;
  int beta_lambda_exponent = 2;

  double alpha_bar() const { return (1.0 + epsilon) / (1.0 - epsilon); }
  void validate() const;
};

enum class PosteriorMode { Exact, Sketched };

// Oversampling rule for inducing-point resparsification. The automatic rule
// evaluates alpha_bar * log(kappa^2 t) at resparsify time; a constant value
// can be supplied instead.
struct QbarRule {
  bool automatic = true;
  double value = 0.0;

  static QbarRule constant(double v) { return QbarRule{false, v}; }
};

// Draws from mt19937_64 mapped explicitly so results do not depend on the
// standard library's distribution implementations.
double uniform53(std::mt19937_64& rng);   // [0, 1) with 53-bit resolution
double gaussian01(std::mt19937_64& rng);  // Box-Muller, two draws per call

// Gaussian-process posterior over accumulated observations with ridge
// lambda. Exact mode keeps an incrementally grown Cholesky factor of
// (K_t + lambda I); sketched mode projects onto a resampled inducing subset
// (Nystrom embedding) and works in the embedded space. Both modes report the
// variance with the unified 1/lambda scaling, so the prior variance is
// k(x,x)/lambda and a saturated sketch reproduces the exact posterior.
class GpPosterior {
public:
  GpPosterior(Kernel kernel, double lambda, PosteriorMode mode,
              ConfidenceParams confidence, QbarRule qbar = {});

  std::size_t size() const { return xs_.size(); }
  PosteriorMode mode() const { return mode_; }
  double lambda() const { return lambda_; }
  const Kernel& kernel() const { return kernel_; }
  const ConfidenceParams& confidence() const { return confidence_; }
  const std::vector<Vector>& points() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }

  struct Prediction {
    double mu = 0.0;
    double sigma = 0.0;
  };

  // Posterior mean and standard deviation at x under the current model.
  Prediction predict(const Vector& x) const;

  // Nystrom-projected kernel value z(a)^T z(b); equals k restricted to the
  // span of the inducing sections, with k~(x,x) <= k(x,x) up to rounding.
  // pre: sketched mode with a non-empty inducing set.
  double nystrom_kernel(const Vector& a, const Vector& b) const;

  // Appends an observation. The selection-time variance sigma^2_t(x) under
  // the pre-append model is recorded in the per-step history; sketched mode
  // then resamples the inducing set from the pre-append variances (the
  // newest point is always included) and rebuilds the embedding. The rng is
  // consumed only by the resampling (one uniform per pre-existing point).
  void append_observation(const Vector& x, double y, std::mt19937_64& rng);

  // Re-samples the inducing set from the stored pre-append variance snapshot
  // with inclusion probabilities p_i = min(qbar * sigma^2_prev(x_i), 1).
  // Invoked by append_observation; exposed for direct exercise. pre: t >= 1.
  void resparsify(std::mt19937_64& rng);

  // Confidence radius
  //   beta_t = 2 lambda^e sqrt(zeta_t + log(1/delta))
  //          + (1 + 1/sqrt(1-epsilon)) sqrt(lambda) F,
  //   zeta_t = alpha_bar * log(kappa^2 t) * sum_s sigma^2_t(x_s),
  // with the variance sum recomputed under the current model. pre: t >= 1.
  double beta() const;

  // Running effective dimension: the sum of the stored per-step
  // (selection-time) variances at the evaluated points. 0 at t = 0.
  double effective_dimension() const;

  const std::vector<double>& variance_history() const { return variance_history_; }

  // Indices (into points()) of the inducing set; equals 0..t-1 in exact mode.
  std::vector<std::size_t> inducing_indices() const;
  std::size_t inducing_size() const;

  // Sum of current-model variances over the dataset (the zeta_t sum).
  double current_variance_sum() const { return zeta_sum_; }

  // Inclusion probabilities used by the most recent resparsification.
  const std::vector<double>& last_inclusion_probabilities() const { return last_probs_; }

private:
  Prediction predict_exact(const Vector& x) const;
  Prediction predict_sketched(const Vector& x) const;
  void append_exact_factor(const Vector& x);
  void rebuild_sketch();
  void refresh_zeta_sum();
  double qbar_now() const;

  Kernel kernel_;
  double lambda_;
  PosteriorMode mode_;
  ConfidenceParams confidence_;
  QbarRule qbar_;

  std::vector<Vector> xs_;
  std::vector<double> ys_;
  std::vector<double> variance_history_;   // selection-time sigma^2 per step
  std::vector<double> prev_variances_;     // pre-append sigma^2 at x_1..x_t
  std::vector<double> last_probs_;

  // Exact cache: lower Cholesky factor of (K_t + lambda I) and its solve
  // against Y_t.
  Matrix chol_;
  Vector weights_;

  // Sketched cache: projector z(x) = proj_ * k_S(x), embedded data rows Z,
  // Cholesky factor of A = Z^T Z + lambda I, and A^{-1} Z^T Y.
  std::vector<std::size_t> inducing_;
  std::vector<Vector> anchors_;
  Matrix proj_;
  Matrix embedded_;
  Eigen::LLT<Matrix> a_llt_;
  Vector sketch_weights_;

  double zeta_sum_ = 0.0;
};

}  // namespace adabkb
