#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "isaacs/grid.hpp"
#include "isaacs/problem.hpp"

namespace isaacs {

/// One-sided difference quotient (u(x + h l_k) - u(x)) / h at interior
/// ordinal `i`, stencil slot `k`; `sign` < 0 uses the direction -l_k.
/// Throws MissingNeighbor when `i` is not interior.
double forward_difference(const GridFunction& u, std::size_t i, std::size_t k,
                          int sign);

/// Centered second difference (u(x + h l_k) - 2 u(x) + u(x - h l_k)) / h^2.
/// Throws MissingNeighbor when `i` is not interior.
double second_difference(const GridFunction& u, std::size_t i, std::size_t k);

/// Parameters of the regularizing extremal operator: the relaxed ellipticity
/// constant delta_hat in (0, delta) and the gradient/zeroth bound k1 >= k0.
struct PucciParams {
  double delta_hat = 0.0;
  double k1 = 0.0;
};

/// Continuous extremal operator
///   sup_{a in S_delta_hat} tr(a M) + k1 |p| - k1 u
/// evaluated in closed form through the eigenvalues of M:
///   sum_i (lambda_i^+ / delta_hat - delta_hat lambda_i^-).
double eval_pucci(const Eigen::MatrixXd& M, const Eigen::VectorXd& p, double u,
                  const PucciParams& params);

/// Certified per-direction coefficient range for the band S_delta_hat on a
/// stencil: q_lo is the decomposition floor (greatest t with all probe
/// decompositions >= t), q_hi[k] the slot-wise maximum coefficient observed
/// over the rotated-extreme probe set together with the isotropic extremes
/// delta_hat * I and I / delta_hat.
struct PucciBox {
  PucciParams params;
  double q_lo = 0.0;
  std::vector<double> q_hi;  // one bound per stencil slot
};

/// Builds the box by probing; throws DecompositionInfeasible when even the
/// isotropic extremes admit no nonnegative decomposition on this stencil.
PucciBox certify_pucci_box(const PucciParams& params, const Stencil& stencil,
                           int probe_count = 64);

/// Monotone envelopes of the gradient magnitude from one-sided differences
/// along the coordinate directions +-e_i. The upper envelope
///   sqrt(sum_i max(d_{+e_i} u, d_{-e_i} u, 0)^2)
/// is nondecreasing in every neighbor value and nonincreasing in u(x); the
/// lower envelope is its negative-side counterpart (equal to minus the upper
/// envelope of -u). Both converge to |grad u| on smooth functions.
double gradient_bound_upper(const GridFunction& u, std::size_t i);
double gradient_bound_lower(const GridFunction& u, std::size_t i);

/// Discrete extremal operator on the grid:
///   sup over q_k in [q_lo, q_hi[k]] of sum_k q_k D2_k u
///     + k1 * gradient_bound_upper(u) - k1 * u(x)
/// computed in closed form, sum_k (q_hi[k] (D2_k u)^+ - q_lo (D2_k u)^-).
double eval_discrete_pucci(const PucciBox& box, const GridFunction& u,
                           std::size_t i);

/// The reflected form -P_h[-v] appearing in the lower truncated equation:
///   sum_k (q_lo (D2_k v)^+ - q_hi[k] (D2_k v)^-)
///     + k1 * gradient_bound_lower(v) - k1 * v(x).
double eval_discrete_pucci_lower(const PucciBox& box, const GridFunction& v,
                                 std::size_t i);

/// Monotone linear row at one interior point: the value is
///   sum_k (cp[k] u(x + h l_k) + cm[k] u(x - h l_k)) + center u(x) + source.
/// Invariants: cp, cm >= 0 entrywise, center <= -(sum cp + sum cm)
/// (row sum <= 0, strictly negative where the zeroth-order coefficient is
/// positive) — the frozen-policy systems are M-matrices.
struct LinearRow {
  std::vector<double> cp, cm;
  double center = 0.0;
  double source = 0.0;
};

/// Precomputed monotone rows of the directional scheme, one per
/// (interior point, control pair):
///   cp[k] = a_k / h^2 + b_k^+ / h,  cm[k] = a_k / h^2 + b_k^- / h,
///   center = -sum_k (cp[k] + cm[k]) - c,  source = f,
/// with a_k the second-order decomposition (maximal minimum coefficient) and
/// b_k the drift expansion on the basis slots, upwinded by sign.
struct SchemeTables {
  const Grid* grid = nullptr;
  std::size_t n_alpha = 0, n_beta = 0;
  std::vector<LinearRow> rows;  // [(i * n_alpha + alpha) * n_beta + beta]

  const LinearRow& row(std::size_t i, std::size_t alpha, std::size_t beta) const {
    return rows[(i * n_alpha + alpha) * n_beta + beta];
  }
  /// max over rows of -(center) = sum_k (2 a_k / h^2 + |b_k| / h) + c;
  /// reciprocal of the largest stable explicit pseudo-time step.
  double max_row_magnitude() const;
};

/// Decomposes every coefficient matrix once (interior points x control
/// pairs); throws DecompositionInfeasible on the first failure.
SchemeTables build_scheme_tables(const IsaacsProblem& problem, const Grid& grid);

/// Value of one frozen-policy row on a grid function.
double eval_row(const LinearRow& row, const Grid& grid, const GridFunction& u,
                std::size_t i);

struct SchemeValue {
  double value = 0.0;
  std::size_t alpha = 0;  // first maximizing control
  std::size_t beta = 0;   // first minimizing control within that row
};

/// The discrete sup-inf operator: max over alpha of min over beta of the
/// frozen rows; ties resolved by the first index in control-set order.
SchemeValue eval_scheme(const SchemeTables& tables, const GridFunction& u,
                        std::size_t i);

/// Which side of the truncation is active at a point.
enum class Branch { isaacs, pucci };

struct TruncatedValue {
  double value = 0.0;
  std::size_t alpha = 0, beta = 0;  // meaningful on the isaacs branch
  Branch branch = Branch::isaacs;
};

/// max(scheme value, discrete Pucci - K); the isaacs branch wins ties.
TruncatedValue eval_truncated_upper(const SchemeTables& tables,
                                    const PucciBox& box, const GridFunction& u,
                                    std::size_t i, double K);

/// min(scheme value, reflected Pucci + K); the isaacs branch wins ties.
TruncatedValue eval_truncated_lower(const SchemeTables& tables,
                                    const PucciBox& box, const GridFunction& v,
                                    std::size_t i, double K);

/// Monotone tangent row of the discrete Pucci operator at the current
/// iterate (active box corner, active gradient side): evaluating the row at
/// `u` reproduces eval_discrete_pucci exactly; freezing it yields an
/// M-matrix row with zero source. `lower` selects the reflected form.
LinearRow linearize_pucci(const PucciBox& box, const GridFunction& u,
                          std::size_t i, bool lower);

/// Largest -(center) any Pucci tangent row can have:
///   sum_k 2 q_hi[k] / h^2 + k1 sqrt(d) / h + k1.
double pucci_row_magnitude(const PucciBox& box, const Grid& grid);

}  // namespace isaacs
