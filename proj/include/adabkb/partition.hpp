#pragma once

#include "adabkb/kernel.hpp"

#include <cstdint>
#include <vector>

namespace adabkb {

// Axis-aligned box search domain with strictly positive side lengths.
struct Domain {
  Vector lo;
  Vector hi;

  static Domain box(Vector lo, Vector hi);
  // Hypercube [lo, hi]^dim.
  static Domain cube(double lo, double hi, int dim);

  int dim() const { return static_cast<int>(lo.size()); }
  Vector sides() const { return hi - lo; }
  bool contains(const Vector& x) const;
};

// Node address in the N-ary partition tree: depth h plus the child-slot path
// from the root. The flat index i in 1..N^h is the base-N number formed by
// the path digits; it is exposed for nodes shallow enough to represent and is
// used only for reporting. Ordering ("smaller i") compares the path
// lexicographically, which coincides with numeric order at equal depth and
// stays exact at depths where N^h overflows any fixed-width integer.
class CellId {
public:
  static CellId root() { return CellId{}; }

  int depth() const { return static_cast<int>(path_.size()); }
  const std::vector<std::uint8_t>& path() const { return path_; }

  // Append a child slot (0-based, < N); the caller validates the range.
  CellId child(int slot) const;
  // Drop the last path digit; pre: depth >= 1.
  CellId parent() const;

  // 1-based flat index at this depth; pre: representable in 64 bits.
  std::uint64_t index1(int N) const;

  bool operator==(const CellId& other) const { return path_ == other.path_; }
  bool operator!=(const CellId& other) const { return !(*this == other); }

  // (depth, path)-lexicographic order used for deterministic tie-breaks.
  static bool index_less(const CellId& a, const CellId& b);

private:
  std::vector<std::uint8_t> path_;
};

// 1-based-id arithmetic: parent of (h, i) is (h-1, ceil(i/N)).
// pre: depth >= 1, path digits < N.
CellId parent_id(const CellId& id, int N);

struct Cell {
  CellId id;
  Vector lo;
  Vector hi;

  Vector centroid() const { return 0.5 * (lo + hi); }
  double half_diameter() const { return 0.5 * (hi - lo).norm(); }
};

Cell root_cell(const Domain& domain);

// N-way equal split of the cell along its longest side (ties resolved toward
// the lowest dimension index). Children are ordered by position along the
// split axis; child j of (h, i) carries id (h+1, N(i-1)+j). pre: N >= 2.
std::vector<Cell> children(const Cell& cell, int N);

// Rebuild the box of an id by walking the split sequence down from the root.
Cell materialize(const Domain& domain, const CellId& id, int N);

struct GeometryConstants {
  double rho = 0.0;  // per-depth contraction factor N^(-1/p)
  double v1 = 0.0;   // half-diameter envelope: hd(h) <= v1 * rho^h
  double v2 = 0.0;   // inscribed-ball envelope (stored, unused at runtime)
};

// Calibrate (rho, v1, v2) for the deterministic per-depth cell shape of the
// longest-side split: all cells at one depth share the same box shape, so the
// envelope is verified exhaustively on the shape sequence up to probe_depth.
// pre: N >= 2, probe_depth >= dim.
GeometryConstants geometry_constants(const Domain& domain, int N, int probe_depth);

}  // namespace adabkb
