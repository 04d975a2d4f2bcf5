#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace isaacs {

/// Error taxonomy. Every failure mode that callers are expected to handle has
/// its own type; the command-line driver maps these onto process exit codes.

/// Malformed or self-contradictory run configuration (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A control index outside the declared control set.
struct UnknownControl : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// A grid was requested whose interior is empty at the given step size.
struct EmptyInterior : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lookup of a lattice point that is neither interior nor boundary.
struct UnclassifiedPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A finite-difference stencil step left the classified grid.
struct MissingNeighbor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No nonnegative directional decomposition with the requested floor exists
/// (exit code 3). Carries the offending matrix for diagnostics.
struct DecompositionInfeasible : std::runtime_error {
  DecompositionInfeasible(const std::string& what, Eigen::MatrixXd matrix)
      : std::runtime_error(what), offending(std::move(matrix)) {}
  Eigen::MatrixXd offending;
};

/// The solver exhausted its iteration budgets (exit code 4).
struct NoConvergence : std::runtime_error {
  NoConvergence(const std::string& what, double residual)
      : std::runtime_error(what), best_residual(residual) {}
  double best_residual;
};

/// The truncated solutions failed to sandwich the reference beyond the
/// allowed tolerance (exit code 5).
struct OrderingViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A barrier certificate check failed (exit code 6).
struct BarrierInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A saddle perturbation table whose upper value is not identically zero.
struct SaddleValueNonzero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mollification requested closer to the sampled region's edge than the
/// kernel radius allows.
struct SupportEscapesRegion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace isaacs
