#include "isaacs/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "isaacs/errors.hpp"

namespace isaacs {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::policy_iteration:
      return "policy-iteration";
    case SolveMethod::pseudo_time:
      return "pseudo-time";
    case SolveMethod::hybrid:
      return "hybrid";
  }
  return "unknown";
}

PucciParams default_pucci_params(const EllipticityBounds& bounds) {
  return {bounds.delta / 2.0, std::max(bounds.k0, 1.0) + 1.0};
}

namespace {

enum class Mode { plain, upper, lower };

constexpr std::int64_t kPucciOption = -1;
constexpr int kInnerCap = 50;
constexpr std::int64_t kPseudoChunk = 500;

/// Evaluation and linearization of the operator being solved, switching
/// between the plain sup-inf scheme and the two truncated variants.
struct Engine {
  const SchemeTables& tables;
  const PucciBox* box = nullptr;
  Mode mode = Mode::plain;
  double K = 0.0;

  const Grid& grid() const { return *tables.grid; }

  double value(const GridFunction& w, std::size_t i) const {
    switch (mode) {
      case Mode::plain:
        return eval_scheme(tables, w, i).value;
      case Mode::upper:
        return eval_truncated_upper(tables, *box, w, i, K).value;
      case Mode::lower:
        return eval_truncated_lower(tables, *box, w, i, K).value;
    }
    return 0.0;
  }

  /// Value of the inner (minimizing) problem with the outer choice frozen.
  double inner_value(const GridFunction& w, std::size_t i,
                     std::int64_t choice) const {
    if (choice == kPucciOption)  // upper mode only
      return eval_discrete_pucci(*box, w, i) - K;
    double best = std::numeric_limits<double>::infinity();
    const auto alpha = static_cast<std::size_t>(choice);
    for (std::size_t beta = 0; beta < tables.n_beta; ++beta)
      best = std::min(best, eval_row(tables.row(i, alpha, beta), grid(), w, i));
    if (mode == Mode::lower)
      best = std::min(best, eval_discrete_pucci_lower(*box, w, i) + K);
    return best;
  }

  /// The outer (maximizing) choice at the current iterate: a control index,
  /// or the regularizing branch in upper mode. First index wins ties.
  std::int64_t outer_choice(const GridFunction& w, std::size_t i) const {
    std::int64_t best_choice = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t alpha = 0; alpha < tables.n_alpha; ++alpha) {
      const double v = inner_value(w, i, static_cast<std::int64_t>(alpha));
      if (v > best) {
        best = v;
        best_choice = static_cast<std::int64_t>(alpha);
      }
    }
    if (mode == Mode::upper &&
        eval_discrete_pucci(*box, w, i) - K > best)
      best_choice = kPucciOption;
    return best_choice;
  }

  /// Monotone linear row of the active inner policy at the current iterate.
  LinearRow active_row(const GridFunction& w, std::size_t i,
                       std::int64_t choice) const {
    if (choice == kPucciOption) {
      LinearRow row = linearize_pucci(*box, w, i, /*lower=*/false);
      row.source -= K;
      return row;
    }
    const auto alpha = static_cast<std::size_t>(choice);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_beta = 0;
    for (std::size_t beta = 0; beta < tables.n_beta; ++beta) {
      const double v = eval_row(tables.row(i, alpha, beta), grid(), w, i);
      if (v < best) {
        best = v;
        best_beta = beta;
      }
    }
    if (mode == Mode::lower &&
        eval_discrete_pucci_lower(*box, w, i) + K < best) {
      LinearRow row = linearize_pucci(*box, w, i, /*lower=*/true);
      row.source += K;
      return row;
    }
    return tables.row(i, alpha, best_beta);
  }

  /// Reciprocal of the largest stable explicit step over every row the
  /// iteration can freeze.
  double step_bound() const {
    double bound = tables.max_row_magnitude();
    if (mode != Mode::plain)
      bound = std::max(bound, pucci_row_magnitude(*box, grid()));
    return bound;
  }
};

/// Shared sparsity pattern: diagonal plus every interior-to-interior
/// stencil link; boundary links go to the right-hand side.
class PolicySolver {
 public:
  explicit PolicySolver(const Grid& grid) : grid_(grid) {}

  /// Solves (frozen rows)(w) = 0 for the interior values, boundary fixed.
  /// Returns false when the factorization fails.
  bool solve(const std::vector<LinearRow>& rows, GridFunction& w,
             double linear_tol) {
    const auto n = static_cast<Eigen::Index>(grid_.n_interior);
    const std::size_t m = grid_.stencil.size();
    triplets_.clear();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < grid_.n_interior; ++i) {
      const LinearRow& row = rows[i];
      triplets_.emplace_back(static_cast<int>(i), static_cast<int>(i),
                             row.center);
      rhs[static_cast<Eigen::Index>(i)] -= row.source;
      for (std::size_t k = 0; k < m; ++k) {
        for (int sign : {+1, -1}) {
          const auto nb = static_cast<std::size_t>(grid_.neighbor(i, k, sign));
          const double coeff = sign > 0 ? row.cp[k] : row.cm[k];
          if (nb < grid_.n_interior)
            triplets_.emplace_back(static_cast<int>(i), static_cast<int>(nb),
                                   coeff);
          else
            rhs[static_cast<Eigen::Index>(i)] -= coeff * w[nb];
        }
      }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(triplets_.begin(), triplets_.end());
    if (!analyzed_) {
      lu_.analyzePattern(A);
      analyzed_ = true;
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success) return false;
    Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) return false;
    // One step of iterative refinement when the direct solve left more
    // residual than requested (rare; keeps linear_tol honest).
    const Eigen::VectorXd r = rhs - A * x;
    if (r.lpNorm<Eigen::Infinity>() >
        linear_tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
      x += lu_.solve(r).eval();
    for (std::size_t i = 0; i < grid_.n_interior; ++i)
      w[i] = x[static_cast<Eigen::Index>(i)];
    return true;
  }

 private:
  const Grid& grid_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

std::pair<GridFunction, SolveReport> run_solver(const Engine& eng,
                                                const GridFunction& initial,
                                                const SolveConfig& config) {
  if (initial.grid != eng.tables.grid)
    throw std::invalid_argument("initial iterate lives on a different grid");
  if (!(config.residual_tol > 0.0) || !(config.pseudo_step_safety > 0.0) ||
      config.pseudo_step_safety > 1.0 || config.max_policy_iters < 0 ||
      config.max_pseudo_steps < 0 || !(config.linear_tol > 0.0))
    throw std::invalid_argument("invalid solver configuration");

  const auto start = std::chrono::steady_clock::now();
  const Grid& grid = eng.grid();
  const std::size_t n = grid.n_interior;
  GridFunction w = initial;
  SolveReport rep;
  PolicySolver linear(grid);

  auto residual = [&](const GridFunction& f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(eng.value(f, i)));
    return worst;
  };

  const double bound = eng.step_bound();
  const double tau = bound > 0.0 ? config.pseudo_step_safety / bound : 1.0;

  double res = residual(w);
  double best = res;
  bool policy_usable = config.max_policy_iters > 0;
  bool policy_phase = policy_usable;
  int stall = 0;
  std::int64_t chunk = 0;
  std::vector<std::int64_t> choice(n);
  std::vector<LinearRow> rows(n);
  std::vector<double> vals(n);

  while (res > config.residual_tol) {
    if (policy_phase && rep.policy_iterations < config.max_policy_iters) {
      // One outer iteration: freeze the maximizing choice, then Howard
      // iteration on the minimizing side with sparse direct evaluation.
      for (std::size_t i = 0; i < n; ++i) choice[i] = eng.outer_choice(w, i);
      bool ok = true;
      double inner_prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < kInnerCap; ++it) {
        for (std::size_t i = 0; i < n; ++i)
          rows[i] = eng.active_row(w, i, choice[i]);
        if (!linear.solve(rows, w, config.linear_tol)) {
          ok = false;
          break;
        }
        double inner_res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          inner_res = std::max(inner_res,
                               std::abs(eng.inner_value(w, i, choice[i])));
        if (inner_res <= 0.5 * config.residual_tol || inner_res >= inner_prev)
          break;
        inner_prev = inner_res;
      }
      if (!ok) {
        policy_usable = false;  // factorization failed; march instead
        policy_phase = false;
        continue;
      }
      ++rep.policy_iterations;
      const double next = residual(w);
      if (next >= res) {
        if (++stall >= 3) {
          policy_phase = false;
          stall = 0;
        }
      } else {
        stall = 0;
      }
      res = next;
      best = std::min(best, res);
      if (rep.policy_iterations >= config.max_policy_iters) policy_phase = false;
      continue;
    }

    // Pseudo-time phase: w <- w + tau * F[w], monotone under the step bound.
    if (rep.pseudo_steps >= config.max_pseudo_steps) {
      if (policy_usable && rep.policy_iterations < config.max_policy_iters) {
        policy_phase = true;
        continue;
      }
      throw NoConvergence("iteration budgets exhausted at residual " +
                              std::to_string(best),
                          best);
    }
    double measured = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vals[i] = eng.value(w, i);
      measured = std::max(measured, std::abs(vals[i]));
    }
    res = measured;
    best = std::min(best, res);
    if (res <= config.residual_tol) break;
    for (std::size_t i = 0; i < n; ++i) w[i] += tau * vals[i];
    ++rep.pseudo_steps;
    if (++chunk >= kPseudoChunk && policy_usable &&
        rep.policy_iterations < config.max_policy_iters) {
      chunk = 0;
      policy_phase = true;
    }
  }

  rep.final_residual = res;
  rep.iterations = rep.policy_iterations + rep.pseudo_steps;
  if (rep.pseudo_steps == 0)
    rep.method_used = SolveMethod::policy_iteration;
  else if (rep.policy_iterations == 0)
    rep.method_used = SolveMethod::pseudo_time;
  else
    rep.method_used = SolveMethod::hybrid;
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {std::move(w), rep};
}

}  // namespace

std::pair<GridFunction, SolveReport> solve_scheme(const SchemeTables& tables,
                                                  const GridFunction& initial,
                                                  const SolveConfig& config) {
  return run_solver(Engine{tables, nullptr, Mode::plain, 0.0}, initial, config);
}

std::pair<GridFunction, SolveReport> solve_truncated(
    const SchemeTables& tables, const PucciBox& box, TruncationSide side,
    double K, const GridFunction& initial, const SolveConfig& config) {
  if (!(K >= 1.0)) throw std::invalid_argument("truncation level K must be >= 1");
  const Mode mode = side == TruncationSide::upper ? Mode::upper : Mode::lower;
  return run_solver(Engine{tables, &box, mode, K}, initial, config);
}

std::pair<GridFunction, SolveReport> solve_isaacs(const IsaacsProblem& problem,
                                                  const Grid& grid,
                                                  const SolveConfig& config) {
  const SchemeTables tables = build_scheme_tables(problem, grid);
  const GridFunction initial = sample(grid, problem.g.value);
  return solve_scheme(tables, initial, config);
}

TruncatedPair solve_truncated_pair(const IsaacsProblem& problem, const Grid& grid,
                                   double K, const SolveConfig& config,
                                   const PucciParams* params) {
  if (!(K >= 1.0)) throw std::invalid_argument("truncation level K must be >= 1");
  const SchemeTables tables = build_scheme_tables(problem, grid);
  const PucciParams pp =
      params ? *params : default_pucci_params(problem.bounds);
  const PucciBox box = certify_pucci_box(pp, grid.stencil);
  const GridFunction initial = sample(grid, problem.g.value);
  auto upper = solve_truncated(tables, box, TruncationSide::upper, K, initial,
                               config);
  auto lower = solve_truncated(tables, box, TruncationSide::lower, K, initial,
                               config);
  return {std::move(upper.first), std::move(lower.first), upper.second,
          lower.second};
}

}  // namespace isaacs
