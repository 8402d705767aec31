#include "adabkb/partition.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adabkb {

namespace {

void check_branching(int N) {
  if (N < 2) {
    throw std::invalid_argument("partition: branching factor N must be >= 2");
  }
}

// Dimension index of the longest side, ties toward the lowest index.
Eigen::Index longest_side(const Vector& lo, const Vector& hi) {
  Eigen::Index best = 0;
  double best_len = hi[0] - lo[0];
  for (Eigen::Index d = 1; d < lo.size(); ++d) {
    const double len = hi[d] - lo[d];
    if (len > best_len) {
      best_len = len;
      best = d;
    }
  }
  return best;
}

}  // namespace

Domain Domain::box(Vector lo, Vector hi) {
  if (lo.size() == 0 || lo.size() != hi.size()) {
    throw std::invalid_argument("domain: bounds must be non-empty and of equal dimension");
  }
  for (Eigen::Index d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d])) {
      throw std::invalid_argument("domain: each lower bound must be below its upper bound");
    }
    if (!std::isfinite(lo[d]) || !std::isfinite(hi[d])) {
      throw std::invalid_argument("domain: bounds must be finite");
    }
  }
  return Domain{std::move(lo), std::move(hi)};
}

Domain Domain::cube(double lo, double hi, int dim) {
  if (dim < 1) {
    throw std::invalid_argument("domain: dimension must be positive");
  }
  return box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Domain::contains(const Vector& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index d = 0; d < lo.size(); ++d) {
    if (x[d] < lo[d] || x[d] > hi[d]) return false;
  }
  return true;
}

CellId CellId::child(int slot) const {
  CellId c = *this;
  c.path_.push_back(static_cast<std::uint8_t>(slot));
  return c;
}

CellId CellId::parent() const {
  if (path_.empty()) {
    throw std::invalid_argument("CellId: the root has no parent");
  }
  CellId p = *this;
  p.path_.pop_back();
  return p;
}

std::uint64_t CellId::index1(int N) const {
  check_branching(N);
  std::uint64_t i = 0;
  const std::uint64_t n = static_cast<std::uint64_t>(N);
  for (std::uint8_t digit : path_) {
    if (digit >= n) {
      throw std::invalid_argument("CellId: path digit out of range for N");
    }
    if (i > (std::numeric_limits<std::uint64_t>::max() - digit) / n) {
      throw std::overflow_error("CellId: flat index not representable at this depth");
    }
    i = i * n + digit;
  }
  return i + 1;
}

bool CellId::index_less(const CellId& a, const CellId& b) {
  if (a.depth() != b.depth()) return a.depth() < b.depth();
  return a.path_ < b.path_;
}

CellId parent_id(const CellId& id, int N) {
  check_branching(N);
  for (std::uint8_t digit : id.path()) {
    if (digit >= static_cast<std::uint8_t>(N)) {
      throw std::invalid_argument("parent_id: path digit out of range for N");
    }
  }
  return id.parent();
}

Cell root_cell(const Domain& domain) {
  return Cell{CellId::root(), domain.lo, domain.hi};
}

std::vector<Cell> children(const Cell& cell, int N) {
  check_branching(N);
  const Eigen::Index axis = longest_side(cell.lo, cell.hi);
  const double width = (cell.hi[axis] - cell.lo[axis]) / N;
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    Cell c;
    c.id = cell.id.child(j);
    c.lo = cell.lo;
    c.hi = cell.hi;
    c.lo[axis] = cell.lo[axis] + j * width;
    // Close the last slice on the parent bound exactly so children tile the cell.
    c.hi[axis] = (j + 1 == N) ? cell.hi[axis] : cell.lo[axis] + (j + 1) * width;
    out.push_back(std::move(c));
  }
  return out;
}

Cell materialize(const Domain& domain, const CellId& id, int N) {
  Cell cell = root_cell(domain);
  for (std::uint8_t slot : id.path()) {
    if (slot >= static_cast<std::uint8_t>(N)) {
      throw std::invalid_argument("materialize: path digit out of range for N");
    }
    cell = children(cell, N)[slot];
  }
  return cell;
}

GeometryConstants geometry_constants(const Domain& domain, int N, int probe_depth) {
  check_branching(N);
  const int p = domain.dim();
  if (probe_depth < p) {
    throw std::invalid_argument("geometry_constants: probe_depth must be >= the domain dimension");
  }

  GeometryConstants g;
  g.rho = std::pow(static_cast<double>(N), -1.0 / p);

  // All cells at one depth share a single box shape: the split dimension is
  // chosen by side lengths only, so the shape sequence is deterministic.
  Vector sides = domain.sides();
  std::vector<double> half_diam(static_cast<std::size_t>(probe_depth) + 1);
  std::vector<double> min_side(static_cast<std::size_t>(probe_depth) + 1);
  for (int h = 0; h <= probe_depth; ++h) {
    half_diam[static_cast<std::size_t>(h)] = 0.5 * sides.norm();
    min_side[static_cast<std::size_t>(h)] = sides.minCoeff();
    Eigen::Index axis = 0;
    sides.maxCoeff(&axis);
    sides[axis] /= N;
  }

  double v1 = 0.0;
  double v2 = std::numeric_limits<double>::infinity();
  for (int h = 0; h <= probe_depth; ++h) {
    const double scale = std::pow(g.rho, h);
    v1 = std::max(v1, half_diam[static_cast<std::size_t>(h)] / scale);
    v2 = std::min(v2, 0.5 * min_side[static_cast<std::size_t>(h)] / scale);
  }
  g.v1 = v1;
  g.v2 = v2;

  // Exhaustive envelope verification over the probed shape sequence.
  for (int h = 0; h <= probe_depth; ++h) {
    const double bound = g.v1 * std::pow(g.rho, h);
    if (half_diam[static_cast<std::size_t>(h)] > bound * (1.0 + 1e-12)) {
      throw std::logic_error("geometry_constants: half-diameter envelope verification failed");
    }
  }
  return g;
}

}  // namespace adabkb
