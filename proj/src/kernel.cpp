#include "adabkb/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adabkb {

namespace {
constexpr double kDistanceRoundingTol = 1e-9;
}  // namespace

Kernel::Kernel(KernelFamily family, std::vector<double> lengthscales)
    : family_(family), lengthscales_(std::move(lengthscales)) {
  if (lengthscales_.empty()) {
    throw std::invalid_argument("kernel requires at least one lengthscale");
  }
  for (double l : lengthscales_) {
    if (!(l > 0.0)) {
      throw std::invalid_argument("kernel lengthscales must be positive");
    }
  }
}

Kernel Kernel::gaussian(double lengthscale) {
  return Kernel(KernelFamily::Gaussian, {lengthscale});
}

Kernel Kernel::gaussian_ard(std::vector<double> lengthscales) {
  return Kernel(KernelFamily::GaussianArd, std::move(lengthscales));
}

double Kernel::min_lengthscale() const {
  return *std::min_element(lengthscales_.begin(), lengthscales_.end());
}

double Kernel::operator()(const Vector& a, const Vector& b) const {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kernel arguments differ in dimension");
  }
  double exponent = 0.0;
  if (family_ == KernelFamily::Gaussian) {
    exponent = (a - b).squaredNorm() / lengthscales_[0];
  } else {
    if (static_cast<std::size_t>(a.size()) != lengthscales_.size()) {
      throw std::invalid_argument("ARD kernel dimension mismatch");
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      exponent += d * d / lengthscales_[static_cast<std::size_t>(i)];
    }
  }
  return std::exp(-exponent);
}

double Kernel::rkhs_distance(const Vector& a, const Vector& b) const {
  const double radicand = diag() + diag() - 2.0 * (*this)(a, b);
  if (radicand < -kDistanceRoundingTol) {
    throw std::runtime_error("rkhs_distance: radicand negative beyond rounding tolerance");
  }
  return std::sqrt(std::max(0.0, radicand));
}

Matrix Kernel::gram(const std::vector<Vector>& pts) const {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = diag();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (*this)(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Vector Kernel::cross(const std::vector<Vector>& pts, const Vector& x) const {
  Vector k(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    k[static_cast<Eigen::Index>(i)] = (*this)(x, pts[i]);
  }
  return k;
}

SmoothnessModel SmoothnessModel::for_kernel(const Kernel& kernel) {
  SmoothnessModel m;
  m.alpha = 1.0;
  m.coefficient = std::sqrt(2.0 / kernel.min_lengthscale());
  m.c_k = m.coefficient;
  m.c_k_prime = m.coefficient;
  m.delta_k = std::numeric_limits<double>::infinity();
  return m;
}

double SmoothnessModel::g(double r) const {
  if (r < 0.0) {
    throw std::invalid_argument("g: radius must be non-negative");
  }
  return coefficient * std::pow(r, alpha);
}

double SmoothnessModel::variation_bound(double F, double v1, double rho, int h) const {
  if (!(F > 0.0)) {
    throw std::invalid_argument("variation_bound: F must be positive");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("variation_bound: rho must lie in (0,1)");
  }
  if (h < 0) {
    throw std::invalid_argument("variation_bound: depth must be non-negative");
  }
  return F * g(v1 * std::pow(rho, h));
}

}  // namespace adabkb
