#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "isaacs/stencil.hpp"

namespace isaacs {

/// Result of the exact max-min linear program
///   maximize t  s.t.  sum_k c_k l_k l_k^T = a,  c_k >= t,
/// solved by exhaustive enumeration of basic solutions (subsets of active
/// c_k = t constraints). `feasible` is false when the equality system has no
/// solution at all; a feasible result with objective < 0 means the matrix is
/// outside the nonnegative cone of the stencil.
struct MaxMinResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> coeffs;
};

/// Deterministic: subsets are scanned in lexicographic order, ties in the
/// objective (within 1e-12 relative) are broken by minimal Euclidean norm.
MaxMinResult maxmin_decomposition(const Eigen::MatrixXd& a, const Stencil& stencil);

/// Directional second-order decomposition a = sum_k a_k l_k l_k^T with
/// a_k >= floor_required >= 0, maximizing min_k a_k. Throws
/// DecompositionInfeasible when the optimum falls below the floor (or no
/// nonnegative solution exists).
std::vector<double> decompose_matrix(const Eigen::MatrixXd& a,
                                     const Stencil& stencil,
                                     double floor_required);

/// Drift expansion on the coordinate basis slots: the returned vector has
/// b_i at the slot of e_i and zero elsewhere (signs retained; the scheme
/// upwinds per direction).
std::vector<double> decompose_drift(const Eigen::VectorXd& b, const Stencil& stencil);

/// Smallest max-min objective over the probe set of rotated extreme matrices
/// R(theta) diag(delta, 1/delta) R(theta)^T, theta = pi j / probe_count.
/// Returns 0 if any probe admits no nonnegative decomposition. This is the
/// floor delta_1 certified for S_delta on this stencil (2-D probe set).
double decomposition_floor(double delta, const Stencil& stencil, int probe_count = 64);

/// One audit row per decomposed matrix; see write_decomposition_audit_csv.
struct DecompositionAuditRow {
  std::int64_t point_id = 0;        // grid ordinal or probe index
  std::size_t alpha = 0, beta = 0;  // control indices (0 for probe audits)
  bool feasible = false;
  double min_coefficient = 0.0;
  double reconstruction_residual = 0.0;  // max abs entry error
  std::vector<double> coeffs;
};

DecompositionAuditRow audit_decomposition(const Eigen::MatrixXd& a,
                                          const Stencil& stencil,
                                          std::int64_t point_id,
                                          std::size_t alpha, std::size_t beta);

}  // namespace isaacs
