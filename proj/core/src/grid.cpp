#include "isaacs/grid.hpp"

#include <algorithm>
#include <cmath>

#include "isaacs/errors.hpp"
#include "isaacs/io.hpp"

namespace isaacs {

namespace {

Point real_point(const LatticeVector& c, double h) {
  Point x(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) x[i] = h * static_cast<double>(c[i]);
  return x;
}

LatticeVector shifted(const LatticeVector& c, const LatticeVector& l, int sign) {
  LatticeVector out = c;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] += sign * l[i];
  return out;
}

}  // namespace

double distance_to_boundary(const Domain& domain, const Point& x) {
  return std::max(domain.signed_distance(x), 0.0);
}

Grid build_grid(const Domain& domain, const Stencil& stencil, double h) {
  if (h <= 0.0) throw std::invalid_argument("grid step must be positive");
  if (stencil.dim != domain.dim())
    throw std::invalid_argument("stencil and domain dimensions differ");
  const int d = stencil.dim;
  const double margin = h * stencil.ball_radius;

  std::vector<std::int64_t> kmin(d), kmax(d);
  for (int i = 0; i < d; ++i) {
    kmin[i] = static_cast<std::int64_t>(std::ceil(domain.box_lo[i] / h - 1e-9));
    kmax[i] = static_cast<std::int64_t>(std::floor(domain.box_hi[i] / h + 1e-9));
  }

  // Lexicographic odometer scan over the bounding lattice box. Interior and
  // boundary lists are appended in scan order, so they come out sorted.
  std::vector<LatticeVector> interior, boundary;
  std::vector<double> rho_int, rho_bd;
  LatticeVector c = kmin;
  while (true) {
    const double sd = domain.signed_distance(real_point(c, h));
    if (sd > margin) {
      interior.push_back(c);
      rho_int.push_back(sd);
    } else if (sd > 0.0) {
      boundary.push_back(c);
      rho_bd.push_back(sd);
    }
    int axis = d - 1;
    while (axis >= 0 && c[axis] == kmax[axis]) {
      c[axis] = kmin[axis];
      --axis;
    }
    if (axis < 0) break;
    ++c[axis];
  }
  if (interior.empty())
    throw EmptyInterior("no interior lattice points at h = " + format_double(h));

  Grid g{domain, stencil, h, {}, {}, {}, 0, {}, {}};
  g.n_interior = interior.size();

  std::map<LatticeVector, std::int64_t> index;
  for (std::size_t i = 0; i < interior.size(); ++i) index[interior[i]] = 1;  // marker
  for (std::size_t i = 0; i < boundary.size(); ++i) index[boundary[i]] = 1;

  // Every stencil neighbor of an interior point is mathematically inside the
  // domain (the distance function is 1-Lipschitz and sd > h * ball_radius),
  // but rounding can leave a neighbor a hair outside; force-classify those
  // as boundary so the neighbor invariant holds unconditionally.
  for (const auto& ci : interior) {
    for (const auto& l : stencil.vectors) {
      for (int sign : {+1, -1}) {
        LatticeVector n = shifted(ci, l, sign);
        if (!index.count(n)) {
          index[n] = 1;
          boundary.push_back(n);
          rho_bd.push_back(std::max(domain.signed_distance(real_point(n, h)), 0.0));
        }
      }
    }
  }
  // Restore lexicographic order within the boundary block.
  {
    std::vector<std::size_t> perm(boundary.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return boundary[a] < boundary[b];
    });
    std::vector<LatticeVector> b2(boundary.size());
    std::vector<double> r2(boundary.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      b2[i] = boundary[perm[i]];
      r2[i] = rho_bd[perm[i]];
    }
    boundary.swap(b2);
    rho_bd.swap(r2);
  }

  g.coords = interior;
  g.coords.insert(g.coords.end(), boundary.begin(), boundary.end());
  g.rho = rho_int;
  g.rho.insert(g.rho.end(), rho_bd.begin(), rho_bd.end());
  g.points.reserve(g.coords.size());
  for (const auto& cc : g.coords) g.points.push_back(real_point(cc, h));
  for (std::size_t i = 0; i < g.coords.size(); ++i)
    g.index[g.coords[i]] = static_cast<std::int64_t>(i);

  const std::size_t m = stencil.size();
  g.neighbors.assign(g.n_interior * m, {-1, -1});
  for (std::size_t i = 0; i < g.n_interior; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      for (int s : {0, 1}) {
        LatticeVector n = shifted(g.coords[i], stencil.vectors[k], s == 0 ? +1 : -1);
        auto it = g.index.find(n);
        if (it == g.index.end())
          throw MissingNeighbor("interior point lost a stencil neighbor");
        g.neighbors[i * m + k][s] = static_cast<std::int32_t>(it->second);
      }
    }
  }
  return g;
}

std::int64_t Grid::ordinal_of(const LatticeVector& c) const {
  auto it = index.find(c);
  return it == index.end() ? -1 : it->second;
}

double GridFunction::at(const LatticeVector& c) const {
  const std::int64_t ord = grid->ordinal_of(c);
  if (ord < 0) throw UnclassifiedPoint("lattice point is not classified");
  return values[static_cast<std::size_t>(ord)];
}

GridFunction sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  GridFunction u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = fn(grid.points[i]);
  return u;
}

void write_grid_csv(const Grid& grid, const std::filesystem::path& path) {
  CsvBuilder csv({"i", "j", "x", "y", "class", "rho"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv.add_row({cell(static_cast<std::int64_t>(grid.coords[i][0])),
                 cell(static_cast<std::int64_t>(grid.coords[i][1])),
                 cell(grid.points[i][0]), cell(grid.points[i][1]),
                 cell(std::string(grid.is_interior(i) ? "interior" : "boundary")),
                 cell(grid.rho[i])});
  }
  atomic_write(path, csv.str());
}

}  // namespace isaacs
