#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace adabkb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class KernelFamily { Gaussian, GaussianArd };

// Stationary Gaussian kernel with the lengthscale entering the exponent
// linearly: k(x, x') = exp(-||x - x'||^2 / l). The ARD variant applies one
// lengthscale per input dimension, exp(-sum_i (x_i - x'_i)^2 / l_i), and
// reduces to the isotropic form when all lengthscales coincide. Both are
// bounded by kappa^2 = 1 on the diagonal.
class Kernel {
public:
  static Kernel gaussian(double lengthscale);
  static Kernel gaussian_ard(std::vector<double> lengthscales);

  KernelFamily family() const { return family_; }
  const std::vector<double>& lengthscales() const { return lengthscales_; }
  double min_lengthscale() const;
  double kappa() const { return 1.0; }

  // k(x, x'); the two points must share the kernel's dimensionality
  // (any dimensionality for the isotropic family).
  double operator()(const Vector& a, const Vector& b) const;

  // k(x, x), constant for this family.
  double diag() const { return 1.0; }

  // RKHS metric d_k(x, x') = sqrt(k(x,x) + k(x',x') - 2 k(x,x')).
  // Tiny negative radicands from rounding are clamped to zero; anything
  // beyond the rounding tolerance indicates a broken kernel and throws.
  double rkhs_distance(const Vector& a, const Vector& b) const;

  // Gram matrix over a point set (symmetric, PSD up to rounding).
  Matrix gram(const std::vector<Vector>& pts) const;

  // Column vector (k(x, p_1), ..., k(x, p_n)).
  Vector cross(const std::vector<Vector>& pts, const Vector& x) const;

private:
  Kernel(KernelFamily family, std::vector<double> lengthscales);

  KernelFamily family_;
  std::vector<double> lengthscales_;  // one entry for the isotropic family
};

// Modulus-of-continuity envelope g(r) = coefficient * r^alpha with
// d_k(x, x') <= g(||x - x'||). For the Gaussian family the envelope
// g(r) = sqrt(2/l) * r holds globally (1 - e^{-u} <= u), so the validity
// radius is unbounded; ARD kernels fall back to the smallest lengthscale.
struct SmoothnessModel {
  double alpha = 1.0;
  double coefficient = 0.0;
  double c_k = 0.0;
  double c_k_prime = 0.0;
  double delta_k = std::numeric_limits<double>::infinity();

  static SmoothnessModel for_kernel(const Kernel& kernel);

  // g(r); pre: r >= 0.
  double g(double r) const;

  // Per-depth cell variation bound V_h = F * g(v1 * rho^h).
  // pre: F > 0, rho in (0,1), h >= 0; v1 as produced by the partition
  // geometry calibration (values below 1 are permitted).
  double variation_bound(double F, double v1, double rho, int h) const;
};

}  // namespace adabkb
