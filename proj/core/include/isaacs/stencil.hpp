#pragma once

#include <cstdint>
#include <vector>

namespace isaacs {

/// Integer lattice vector; length equals the space dimension.
using LatticeVector = std::vector<std::int64_t>;

/// Finite set of lattice directions used by the directional scheme.
/// Invariants (checked at construction): the coordinate basis e_1..e_d is
/// present, vectors are nonzero and pairwise distinct.
struct Stencil {
  explicit Stencil(std::vector<LatticeVector> vs);

  std::size_t size() const { return vectors.size(); }
  /// Position of e_axis inside `vectors`.
  std::size_t basis_slot(int axis) const { return basis_slots.at(axis); }

  std::vector<LatticeVector> vectors;
  std::vector<std::size_t> basis_slots;  // index of e_1..e_d in `vectors`
  int dim = 0;
  double ball_radius = 0.0;  // max_k |l_k|; grids keep a margin of h * this
};

/// Coordinate directions only: {e_1, ..., e_d}.
Stencil axis_stencil(int dim);
/// Basis plus all diagonals e_i + e_j and e_i - e_j (i < j);
/// in 2-D: {e1, e2, e1+e2, e1-e2}.
Stencil default_stencil(int dim);
/// 2-D only: default stencil plus (2,1), (2,-1), (1,2), (1,-2);
/// maximal angular gap 26.57 degrees.
Stencil extended_stencil();

double norm(const LatticeVector& l);
long long squared_norm(const LatticeVector& l);

}  // namespace isaacs
