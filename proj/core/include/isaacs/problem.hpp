#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "isaacs/geometry.hpp"

namespace isaacs {

/// The ellipticity constant delta in (0, 1) and the data bound k0 >= 0:
/// coefficient matrices must satisfy delta |xi|^2 <= xi^T a xi <= |xi|^2 / delta,
/// and |b|, c, |f|, the Hoelder quotients of a, and the C^{1,1} norm of the
/// boundary data are all bounded by k0.
struct EllipticityBounds {
  double delta = 0.0;
  double k0 = 0.0;
};

/// Finite ordered control set; order defines tie-breaking and reporting.
struct ControlSet {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
};

/// Scalar function with caller-supplied first and second derivatives.
struct SmoothFunction {
  std::function<double(const Point&)> value;
  std::function<Eigen::VectorXd(const Point&)> gradient;
  std::function<Eigen::MatrixXd(const Point&)> hessian;
};

/// Coefficient data (a, b, c, f) indexed by control pair and point, with the
/// declared regularity exponents: gamma for a (Hoelder), tau for b, c, f
/// (modulus omega(t) = t^tau).
struct CoefficientField {
  std::function<Eigen::MatrixXd(std::size_t, std::size_t, const Point&)> a;
  std::function<Eigen::VectorXd(std::size_t, std::size_t, const Point&)> b;
  std::function<double(std::size_t, std::size_t, const Point&)> c;
  std::function<double(std::size_t, std::size_t, const Point&)> f;
  double gamma = 0.0;
  double tau = 0.0;
};

/// A Dirichlet problem for the Isaacs operator
///   sup_alpha inf_beta [ a_ij D_ij u + b_i D_i u - c u + f ] = 0  in the domain,
///   u = g on the boundary.
struct IsaacsProblem {
  Domain domain;
  ControlSet controls_a;
  ControlSet controls_b;
  CoefficientField coeffs;
  SmoothFunction g;
  EllipticityBounds bounds;
};

/// The exponent gamma(chi) = (4 - 3 chi) / (8 - 4 chi); strictly below 1/2
/// for chi in (0, 1), decreasing in chi.
double hoelder_gamma(double chi);

/// Value of the linear generator a_ij D_ij phi + b_i D_i phi - c phi for one
/// control pair. Throws UnknownControl for out-of-range indices.
double eval_generator(const IsaacsProblem& problem, std::size_t alpha,
                      std::size_t beta, const SmoothFunction& phi, const Point& x);

struct IsaacsValue {
  double value = 0.0;
  std::size_t alpha = 0;  // first maximizing index
  std::size_t beta = 0;   // first minimizing index within that row
};

/// max over alpha of min over beta of [generator + f]; ties resolved by the
/// first index in control-set order.
IsaacsValue eval_isaacs(const IsaacsProblem& problem, const SmoothFunction& phi,
                        const Point& x);

/// Spot-check report for the problem invariants: ellipticity of a on a fixed
/// direction probe set, bounds on b, c, f, Hoelder quotients of a, and the
/// C^{1,1} bound on g, all over `samples` random points of the domain.
struct ValidationReport {
  bool ok = true;
  double min_ellipticity_margin = 0.0;  // min over probes of the S_delta slack
  double max_drift = 0.0;
  double max_zeroth = 0.0;  // max of c (also checked nonnegative)
  double max_source = 0.0;
  double max_a_hoelder = 0.0;  // max sampled quotient |a(x)-a(y)| / |x-y|^gamma
  double max_g_c11 = 0.0;      // max of |g|, |Dg|, sampled |Dg| quotient
  std::string first_failure;   // empty when ok
};

ValidationReport validate_problem(const IsaacsProblem& problem, int samples = 256,
                                  std::uint64_t seed = 1);

/// Max deviation of the supplied gradient and hessian from central finite
/// differences of `value` over the probe points (step 1e-5 by default).
double check_derivatives(const SmoothFunction& fn, const std::vector<Point>& probes,
                         double step = 1e-5);

/// Rejection-samples `count` points from the domain's bounding box.
std::vector<Point> sample_in_domain(const Domain& domain, int count,
                                    std::uint64_t seed);

}  // namespace isaacs
