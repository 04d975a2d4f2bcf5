#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "isaacs/discrete.hpp"
#include "isaacs/grid.hpp"
#include "isaacs/problem.hpp"

namespace isaacs {

/// Tolerances and budgets of the nonlinear solver.
struct SolveConfig {
  double residual_tol = 1e-9;        // sup-norm of the scheme over the interior
  int max_policy_iters = 200;        // outer policy-iteration budget
  std::int64_t max_pseudo_steps = 2'000'000;
  double pseudo_step_safety = 0.9;   // fraction of the stability limit
  double linear_tol = 1e-12;         // residual bound for policy sub-solves
};

enum class SolveMethod { policy_iteration, pseudo_time, hybrid };

std::string to_string(SolveMethod m);

struct SolveReport {
  std::int64_t iterations = 0;  // policy_iterations + pseudo_steps
  int policy_iterations = 0;
  std::int64_t pseudo_steps = 0;
  double final_residual = 0.0;
  SolveMethod method_used = SolveMethod::policy_iteration;
  double wall_time = 0.0;  // seconds; excluded from deterministic artifacts
};

/// Which truncated equation to solve.
enum class TruncationSide {
  upper,  // max(F_h[u], P_h[u] - K) = 0
  lower   // min(F_h[v], -P_h[-v] + K) = 0
};

/// Defaults derived from the problem bounds: delta_hat = delta / 2,
/// k1 = max(k0, 1) + 1.
PucciParams default_pucci_params(const EllipticityBounds& bounds);

/// Solves F_h[w] = 0 over the interior with the boundary rows of `initial`
/// held fixed; `initial` is also the starting iterate. Policy iteration
/// (outer freeze of the maximizing control, inner Howard iteration on the
/// minimizing control, sparse LU policy evaluation) with a monotone
/// pseudo-time fallback after three consecutive non-decreasing residuals;
/// control returns to policy iteration every 500 pseudo-steps.
/// Throws NoConvergence when both budgets are exhausted above tolerance.
std::pair<GridFunction, SolveReport> solve_scheme(const SchemeTables& tables,
                                                  const GridFunction& initial,
                                                  const SolveConfig& config);

/// Same machinery for one truncated equation; the regularizing branch enters
/// as one extra option of the maximizing (upper) or minimizing (lower)
/// player, linearized by its monotone tangent rows.
std::pair<GridFunction, SolveReport> solve_truncated(
    const SchemeTables& tables, const PucciBox& box, TruncationSide side,
    double K, const GridFunction& initial, const SolveConfig& config);

/// Convenience wrapper: builds the tables, samples g as the initial guess
/// (so the boundary condition holds exactly), and calls solve_scheme.
std::pair<GridFunction, SolveReport> solve_isaacs(const IsaacsProblem& problem,
                                                  const Grid& grid,
                                                  const SolveConfig& config = {});

struct TruncatedPair {
  GridFunction u;  // solution of the upper truncated equation
  GridFunction v;  // solution of the lower truncated equation
  SolveReport report_u, report_v;
};

/// Solves both truncated equations at level K >= 1 (throws
/// std::invalid_argument otherwise) with the default Pucci parameters for
/// the problem's bounds unless `params` is supplied.
TruncatedPair solve_truncated_pair(const IsaacsProblem& problem, const Grid& grid,
                                   double K, const SolveConfig& config = {},
                                   const PucciParams* params = nullptr);

}  // namespace isaacs
