#include "isaacs/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isaacs/decomposition.hpp"
#include "isaacs/errors.hpp"

namespace isaacs {

namespace {

void require_interior(const Grid& grid, std::size_t i) {
  if (i >= grid.n_interior)
    throw MissingNeighbor("difference stencil rooted at non-interior ordinal " +
                          std::to_string(i));
}

void check_params(const PucciParams& params) {
  if (!(params.delta_hat > 0.0 && params.delta_hat < 1.0))
    throw std::invalid_argument("delta_hat outside (0, 1)");
  if (!(params.k1 >= 0.0)) throw std::invalid_argument("k1 negative");
}

}  // namespace

double forward_difference(const GridFunction& u, std::size_t i, std::size_t k,
                          int sign) {
  const Grid& grid = *u.grid;
  require_interior(grid, i);
  const std::int32_t n = grid.neighbor(i, k, sign);
  return (u[static_cast<std::size_t>(n)] - u[i]) / grid.h;
}

double second_difference(const GridFunction& u, std::size_t i, std::size_t k) {
  const Grid& grid = *u.grid;
  require_interior(grid, i);
  const std::int32_t np = grid.neighbor(i, k, +1);
  const std::int32_t nm = grid.neighbor(i, k, -1);
  return (u[static_cast<std::size_t>(np)] - 2.0 * u[i] +
          u[static_cast<std::size_t>(nm)]) /
         (grid.h * grid.h);
}

double eval_pucci(const Eigen::MatrixXd& M, const Eigen::VectorXd& p, double u,
                  const PucciParams& params) {
  check_params(params);
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  double second = 0.0;
  for (Eigen::Index i = 0; i < sym.rows(); ++i) {
    const double lam = es.eigenvalues()[i];
    second += lam > 0.0 ? lam / params.delta_hat : params.delta_hat * lam;
  }
  return second + params.k1 * p.norm() - params.k1 * u;
}

PucciBox certify_pucci_box(const PucciParams& params, const Stencil& stencil,
                           int probe_count) {
  check_params(params);
  if (stencil.dim != 2)
    throw std::invalid_argument("Pucci box certification uses a 2-D probe set");
  PucciBox box;
  box.params = params;
  box.q_lo = decomposition_floor(params.delta_hat, stencil, probe_count);
  box.q_hi.assign(stencil.size(), 0.0);

  auto absorb = [&](const Eigen::Matrix2d& a) -> bool {
    const MaxMinResult r = maxmin_decomposition(a, stencil);
    if (!r.feasible || r.objective < 0.0) return false;
    for (std::size_t k = 0; k < stencil.size(); ++k)
      box.q_hi[k] = std::max(box.q_hi[k], std::max(r.coeffs[k], 0.0));
    return true;
  };

  const double d = params.delta_hat;
  if (!absorb(d * Eigen::Matrix2d::Identity()) ||
      !absorb((1.0 / d) * Eigen::Matrix2d::Identity()))
    throw DecompositionInfeasible("isotropic extreme not representable",
                                  Eigen::Matrix2d::Identity() / d);
  for (int j = 0; j < probe_count; ++j) {
    const double th = M_PI * j / probe_count;
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d a =
        rot * Eigen::Vector2d(d, 1.0 / d).asDiagonal() * rot.transpose();
    absorb(a);  // non-representable probes simply do not widen the box
  }
  return box;
}

double gradient_bound_upper(const GridFunction& u, std::size_t i) {
  const Grid& grid = *u.grid;
  require_interior(grid, i);
  double sq = 0.0;
  for (int axis = 0; axis < grid.stencil.dim; ++axis) {
    const std::size_t slot = grid.stencil.basis_slot(axis);
    const double fp = forward_difference(u, i, slot, +1);
    const double fm = forward_difference(u, i, slot, -1);
    const double g = std::max({fp, fm, 0.0});
    sq += g * g;
  }
  return std::sqrt(sq);
}

double gradient_bound_lower(const GridFunction& u, std::size_t i) {
  const Grid& grid = *u.grid;
  require_interior(grid, i);
  double sq = 0.0;
  for (int axis = 0; axis < grid.stencil.dim; ++axis) {
    const std::size_t slot = grid.stencil.basis_slot(axis);
    const double fp = forward_difference(u, i, slot, +1);
    const double fm = forward_difference(u, i, slot, -1);
    const double g = std::min({fp, fm, 0.0});
    sq += g * g;
  }
  return -std::sqrt(sq);
}

double eval_discrete_pucci(const PucciBox& box, const GridFunction& u,
                           std::size_t i) {
  const Grid& grid = *u.grid;
  double total = 0.0;
  for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
    const double d2 = second_difference(u, i, k);
    total += d2 > 0.0 ? box.q_hi[k] * d2 : box.q_lo * d2;
  }
  return total + box.params.k1 * gradient_bound_upper(u, i) -
         box.params.k1 * u[i];
}

double eval_discrete_pucci_lower(const PucciBox& box, const GridFunction& v,
                                 std::size_t i) {
  const Grid& grid = *v.grid;
  double total = 0.0;
  for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
    const double d2 = second_difference(v, i, k);
    total += d2 > 0.0 ? box.q_lo * d2 : box.q_hi[k] * d2;
  }
  return total + box.params.k1 * gradient_bound_lower(v, i) -
         box.params.k1 * v[i];
}

double SchemeTables::max_row_magnitude() const {
  double worst = 0.0;
  for (const LinearRow& r : rows) worst = std::max(worst, -r.center);
  return worst;
}

SchemeTables build_scheme_tables(const IsaacsProblem& problem, const Grid& grid) {
  SchemeTables tables;
  tables.grid = &grid;
  tables.n_alpha = problem.controls_a.size();
  tables.n_beta = problem.controls_b.size();
  if (tables.n_alpha == 0 || tables.n_beta == 0)
    throw UnknownControl("empty control set");

  const std::size_t m = grid.stencil.size();
  const double h = grid.h;
  const double h2 = h * h;
  tables.rows.reserve(grid.n_interior * tables.n_alpha * tables.n_beta);
  for (std::size_t i = 0; i < grid.n_interior; ++i) {
    const Point& x = grid.points[i];
    for (std::size_t alpha = 0; alpha < tables.n_alpha; ++alpha) {
      for (std::size_t beta = 0; beta < tables.n_beta; ++beta) {
        const std::vector<double> a =
            decompose_matrix(problem.coeffs.a(alpha, beta, x), grid.stencil, 0.0);
        const std::vector<double> b =
            decompose_drift(problem.coeffs.b(alpha, beta, x), grid.stencil);
        LinearRow row;
        row.cp.resize(m);
        row.cm.resize(m);
        double off_sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          row.cp[k] = a[k] / h2 + std::max(b[k], 0.0) / h;
          row.cm[k] = a[k] / h2 + std::max(-b[k], 0.0) / h;
          off_sum += row.cp[k] + row.cm[k];
        }
        row.center = -off_sum - problem.coeffs.c(alpha, beta, x);
        row.source = problem.coeffs.f(alpha, beta, x);
        tables.rows.push_back(std::move(row));
      }
    }
  }
  return tables;
}

double eval_row(const LinearRow& row, const Grid& grid, const GridFunction& u,
                std::size_t i) {
  double total = row.center * u[i] + row.source;
  for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
    total += row.cp[k] * u[static_cast<std::size_t>(grid.neighbor(i, k, +1))];
    total += row.cm[k] * u[static_cast<std::size_t>(grid.neighbor(i, k, -1))];
  }
  return total;
}

SchemeValue eval_scheme(const SchemeTables& tables, const GridFunction& u,
                        std::size_t i) {
  require_interior(*tables.grid, i);
  SchemeValue best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t alpha = 0; alpha < tables.n_alpha; ++alpha) {
    double row_value = std::numeric_limits<double>::infinity();
    std::size_t row_beta = 0;
    for (std::size_t beta = 0; beta < tables.n_beta; ++beta) {
      const double v = eval_row(tables.row(i, alpha, beta), *tables.grid, u, i);
      if (v < row_value) {
        row_value = v;
        row_beta = beta;
      }
    }
    if (row_value > best.value) {
      best.value = row_value;
      best.alpha = alpha;
      best.beta = row_beta;
    }
  }
  return best;
}

TruncatedValue eval_truncated_upper(const SchemeTables& tables,
                                    const PucciBox& box, const GridFunction& u,
                                    std::size_t i, double K) {
  const SchemeValue f = eval_scheme(tables, u, i);
  const double p = eval_discrete_pucci(box, u, i) - K;
  TruncatedValue out;
  if (p > f.value) {
    out.value = p;
    out.branch = Branch::pucci;
  } else {
    out.value = f.value;
    out.alpha = f.alpha;
    out.beta = f.beta;
    out.branch = Branch::isaacs;
  }
  return out;
}

TruncatedValue eval_truncated_lower(const SchemeTables& tables,
                                    const PucciBox& box, const GridFunction& v,
                                    std::size_t i, double K) {
  const SchemeValue f = eval_scheme(tables, v, i);
  const double p = eval_discrete_pucci_lower(box, v, i) + K;
  TruncatedValue out;
  if (p < f.value) {
    out.value = p;
    out.branch = Branch::pucci;
  } else {
    out.value = f.value;
    out.alpha = f.alpha;
    out.beta = f.beta;
    out.branch = Branch::isaacs;
  }
  return out;
}

LinearRow linearize_pucci(const PucciBox& box, const GridFunction& u,
                          std::size_t i, bool lower) {
  const Grid& grid = *u.grid;
  require_interior(grid, i);
  const std::size_t m = grid.stencil.size();
  const double h = grid.h;
  LinearRow row;
  row.cp.assign(m, 0.0);
  row.cm.assign(m, 0.0);
  double off_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d2 = second_difference(u, i, k);
    // Active corner of the coefficient box; at d2 == 0 the choice is
    // immaterial for the value, fixed here for determinism.
    const double q = lower ? (d2 > 0.0 ? box.q_lo : box.q_hi[k])
                           : (d2 > 0.0 ? box.q_hi[k] : box.q_lo);
    const double w = q / (h * h);
    row.cp[k] += w;
    row.cm[k] += w;
    off_sum += 2.0 * w;
  }

  // Active side and subgradient of the gradient envelope.
  const int d = grid.stencil.dim;
  std::vector<double> g(d, 0.0);
  std::vector<int> side(d, 0);  // +1 forward neighbor, -1 backward, 0 inactive
  double norm_sq = 0.0;
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t slot = grid.stencil.basis_slot(axis);
    const double fp = forward_difference(u, i, slot, +1);
    const double fm = forward_difference(u, i, slot, -1);
    const double env = lower ? std::min({fp, fm, 0.0}) : std::max({fp, fm, 0.0});
    g[axis] = env;
    if (env != 0.0) side[axis] = (env == fp) ? +1 : -1;
    norm_sq += env * env;
  }
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (int axis = 0; axis < d; ++axis) {
      if (side[axis] == 0) continue;
      // Upper: weight g/|g| >= 0 on the active side. Lower: the envelope is
      // -|g| with g <= 0, so the weight -g/|g| is again nonnegative.
      const double weight =
          box.params.k1 * (lower ? -g[axis] : g[axis]) / norm / h;
      const std::size_t slot = grid.stencil.basis_slot(axis);
      (side[axis] > 0 ? row.cp[slot] : row.cm[slot]) += weight;
      off_sum += weight;
    }
  }
  row.center = -off_sum - box.params.k1;
  row.source = 0.0;
  return row;
}

double pucci_row_magnitude(const PucciBox& box, const Grid& grid) {
  double sum = 0.0;
  for (double q : box.q_hi) sum += 2.0 * q;
  return sum / (grid.h * grid.h) +
         box.params.k1 * std::sqrt(static_cast<double>(grid.stencil.dim)) / grid.h +
         box.params.k1;
}

}  // namespace isaacs
