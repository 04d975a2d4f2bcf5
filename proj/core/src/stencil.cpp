#include "isaacs/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace isaacs {

long long squared_norm(const LatticeVector& l) {
  long long s = 0;
  for (auto v : l) s += v * v;
  return s;
}

double norm(const LatticeVector& l) {
  return std::sqrt(static_cast<double>(squared_norm(l)));
}

Stencil::Stencil(std::vector<LatticeVector> vs) : vectors(std::move(vs)) {
  if (vectors.empty()) throw std::invalid_argument("stencil must be nonempty");
  dim = static_cast<int>(vectors.front().size());
  std::set<LatticeVector> seen;
  for (const auto& l : vectors) {
    if (static_cast<int>(l.size()) != dim)
      throw std::invalid_argument("stencil vectors must share one dimension");
    if (squared_norm(l) == 0)
      throw std::invalid_argument("stencil vectors must be nonzero");
    if (!seen.insert(l).second)
      throw std::invalid_argument("stencil vectors must be distinct");
    ball_radius = std::max(ball_radius, norm(l));
  }
  basis_slots.assign(dim, vectors.size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    int axis = -1, nonzero = 0;
    for (int i = 0; i < dim; ++i) {
      if (vectors[k][i] != 0) {
        ++nonzero;
        axis = i;
      }
    }
    if (nonzero == 1 && vectors[k][axis] == 1) basis_slots[axis] = k;
  }
  for (int i = 0; i < dim; ++i) {
    if (basis_slots[i] == vectors.size())
      throw std::invalid_argument("stencil must contain every coordinate basis vector");
  }
}

Stencil axis_stencil(int dim) {
  std::vector<LatticeVector> vs;
  for (int i = 0; i < dim; ++i) {
    LatticeVector e(dim, 0);
    e[i] = 1;
    vs.push_back(e);
  }
  return Stencil(vs);
}

Stencil default_stencil(int dim) {
  std::vector<LatticeVector> vs;
  for (int i = 0; i < dim; ++i) {
    LatticeVector e(dim, 0);
    e[i] = 1;
    vs.push_back(e);
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      LatticeVector p(dim, 0), m(dim, 0);
      p[i] = 1;
      p[j] = 1;
      m[i] = 1;
      m[j] = -1;
      vs.push_back(p);
      vs.push_back(m);
    }
  }
  return Stencil(vs);
}

Stencil extended_stencil() {
  std::vector<LatticeVector> vs = {{1, 0}, {0, 1}, {1, 1}, {1, -1},
                                   {2, 1}, {2, -1}, {1, 2}, {1, -2}};
  return Stencil(vs);
}

}  // namespace isaacs
