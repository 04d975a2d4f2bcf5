#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isaacs/geometry.hpp"
#include "isaacs/problem.hpp"

namespace isaacs {

/// One (a, b, c, f) tuple per control pair, constant in x;
/// tables are indexed [alpha][beta].
CoefficientField make_constant_field(std::vector<std::vector<Eigen::Matrix2d>> a,
                                     std::vector<std::vector<Eigen::Vector2d>> b,
                                     std::vector<std::vector<double>> c,
                                     std::vector<std::vector<double>> f,
                                     double gamma, double tau);

struct SmoothFamilyParams {
  double anisotropy = 0.3;  // eigenvalues of a stay within 1 +- anisotropy
  double drift = 0.6;       // |b| bound
  double zeroth = 0.2;      // c ranges over [0, zeroth]
  double source = 1.0;      // |f| bound
  double frequency = 1.0;   // spatial frequency multiplier
};

/// Trigonometric coefficient family: every entry is C^inf, control pairs are
/// distinguished by deterministic golden-angle phases, eigenvalues of a stay
/// in [1 - anisotropy, 1 + anisotropy].
CoefficientField make_smooth_periodic_field(std::size_t n_alpha, std::size_t n_beta,
                                            double gamma, double tau,
                                            const SmoothFamilyParams& params = {});

struct RoughFamilyParams {
  double anisotropy = 0.45;     // max eigenvalue deviation of a from 1 (before
                                // the radial profile, which is <= ~0.86 here)
  double drift = 0.8;           // |b| scale
  double zeroth = 0.3;          // c scale (c >= 0 by construction)
  double source = 1.5;          // f scale
  double anchor_radius = 0.45;  // anchor ring radius, relative to the domain box
};

/// Hoelder-rough family: radial fractional powers |x - p|^gamma (for a) and
/// |x - q|^tau (for b, c, f) around control-pair-specific anchor points
/// inside the domain. The fields are exactly C^gamma / C^tau at the anchors,
/// matching the declared exponents; anchors and orientations derive
/// deterministically from the pair index.
CoefficientField make_rough_field(std::size_t n_alpha, std::size_t n_beta,
                                  double gamma, double tau, const Domain& domain,
                                  const RoughFamilyParams& params = {});

}  // namespace isaacs
