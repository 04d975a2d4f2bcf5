#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <vector>

#include "isaacs/geometry.hpp"
#include "isaacs/stencil.hpp"

namespace isaacs {

enum class PointClass { interior, boundary };

/// Lattice grid over a domain at step h. Points live on the absolute lattice
/// h * Z^d. Classification:
///   interior  : signed_distance(x) > h * stencil.ball_radius
///   boundary  : in the domain (signed_distance > 0) but not interior, plus
///               any stencil neighbor of an interior point that floating
///               point rounding left unclassified (forced in, so the
///               neighbor invariant below holds by construction).
/// Ordinals: interior points first, then boundary points, each block sorted
/// lexicographically by integer coordinates — enumeration is deterministic.
/// Invariant: for every interior ordinal i and stencil slot k, both
/// x + h l_k and x - h l_k are classified; their ordinals are in `neighbors`.
struct Grid {
  Domain domain;
  Stencil stencil;
  double h = 0.0;

  std::vector<LatticeVector> coords;  // integer coordinates per ordinal
  std::vector<Point> points;          // h * coords
  std::vector<double> rho;            // signed distance per ordinal
  std::size_t n_interior = 0;

  // neighbors[i * stencil.size() + k] = {ordinal(x + h l_k), ordinal(x - h l_k)}
  std::vector<std::array<std::int32_t, 2>> neighbors;

  std::size_t size() const { return coords.size(); }
  std::size_t n_boundary() const { return coords.size() - n_interior; }
  bool is_interior(std::size_t ordinal) const { return ordinal < n_interior; }
  PointClass point_class(std::size_t ordinal) const {
    return ordinal < n_interior ? PointClass::interior : PointClass::boundary;
  }
  /// Ordinal of a lattice coordinate, or -1 if unclassified.
  std::int64_t ordinal_of(const LatticeVector& c) const;
  std::int32_t neighbor(std::size_t i, std::size_t k, int sign) const {
    return neighbors[i * stencil.size() + k][sign > 0 ? 0 : 1];
  }

  std::map<LatticeVector, std::int64_t> index;  // coordinate -> ordinal
};

/// Enumerates and classifies the grid. Throws EmptyInterior if no lattice
/// point is interior at this h.
Grid build_grid(const Domain& domain, const Stencil& stencil, double h);

/// Exact distance from x to the complement of the domain (the paper's rho);
/// simply evaluates the signed distance, clamped at 0 from below for
/// outside points.
double distance_to_boundary(const Domain& domain, const Point& x);

/// Scalar values attached to every classified point of one grid.
struct GridFunction {
  explicit GridFunction(const Grid& g)
      : grid(&g), values(g.size(), 0.0) {}
  GridFunction(const Grid& g, std::vector<double> v)
      : grid(&g), values(std::move(v)) {}

  const Grid* grid;
  std::vector<double> values;

  double& operator[](std::size_t ordinal) { return values[ordinal]; }
  double operator[](std::size_t ordinal) const { return values[ordinal]; }
  /// Value at a lattice coordinate; throws UnclassifiedPoint if absent.
  double at(const LatticeVector& c) const;
};

/// Samples a pointwise function over all classified points.
GridFunction sample(const Grid& grid,
                    const std::function<double(const Point&)>& fn);

/// CSV dump with columns (i, j, x, y, class, rho); floats use shortest
/// round-trip formatting. Written atomically.
void write_grid_csv(const Grid& grid, const std::filesystem::path& path);

}  // namespace isaacs
