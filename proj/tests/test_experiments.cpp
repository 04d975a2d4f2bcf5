#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "isaacs/coefficients.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/experiments.hpp"
#include "isaacs/geometry.hpp"
#include "isaacs/grid.hpp"
#include "isaacs/problem.hpp"
#include "isaacs/solver.hpp"

using namespace isaacs;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

SmoothFunction constant_fn(double kappa) {
  SmoothFunction f;
  f.value = [kappa](const Point&) { return kappa; };
  f.gradient = [](const Point& x) { return Eigen::VectorXd::Zero(x.size()).eval(); };
  f.hessian = [](const Point& x) {
    return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
  };
  return f;
}

SmoothFunction affine_fn(const Eigen::Vector2d& slope, double offset) {
  SmoothFunction f;
  f.value = [=](const Point& x) { return slope.dot(x) + offset; };
  f.gradient = [=](const Point&) { return Eigen::VectorXd(slope); };
  f.hessian = [](const Point& x) {
    return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
  };
  return f;
}

}  // namespace

TEST_CASE("log-log fitter recovers exact power laws") {
  const std::vector<double> hs = {0.5, 0.25, 0.125, 0.0625};
  std::vector<double> linear, quadratic;
  for (double h : hs) {
    linear.push_back(3.0 * h);
    quadratic.push_back(0.7 * h * h);
  }
  const PowerFit f1 = fit_loglog(hs, linear, 0.0);
  CHECK(std::abs(f1.slope - 1.0) <= 1e-6);
  CHECK(f1.residual <= 1e-9);
  CHECK(f1.points_used == 4);
  const PowerFit f2 = fit_loglog(hs, quadratic, 0.0);
  CHECK(std::abs(f2.slope - 2.0) <= 1e-6);

  // Noise cutoff drops small entries; too few survivors is an error.
  std::vector<double> noisy = linear;
  noisy[3] = 1e-12;
  const PowerFit f3 = fit_loglog(hs, noisy, 1e-6);
  CHECK(f3.points_used == 3);
  CHECK(std::abs(f3.slope - 1.0) <= 1e-6);
  CHECK_THROWS_AS(fit_loglog(hs, {1.0, 1e-12, 1e-12, 1e-12}, 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog({0.5, 0.5}, {1.0, 2.0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog({0.5, 0.25}, {1.0, -1.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("manufactured source construction") {
  // Zero exact solution: the manufactured source vanishes identically.
  IsaacsProblem skeleton;
  skeleton.domain = make_disk(pt(0.0, 0.0), 1.0);
  skeleton.controls_a.labels = {"only"};
  skeleton.controls_b.labels = {"only"};
  skeleton.coeffs = make_constant_field({{Eigen::Matrix2d::Identity()}},
                                        {{Eigen::Vector2d(0.3, -0.2)}}, {{0.1}},
                                        {{5.0}}, hoelder_gamma(0.1), 0.5);
  skeleton.g = constant_fn(0.0);
  skeleton.bounds = {0.2, 20.0};
  const ManufacturedCase zero_case = make_bellman_case(constant_fn(0.0), skeleton);
  for (double t : {0.0, 0.3, -0.5})
    CHECK(zero_case.problem.coeffs.f(0, 0, pt(t, -t * 0.5)) == 0.0);
  CHECK(construction_check(zero_case) <= 1e-12);
  CHECK(to_string(zero_case.family) == "bellman-single");

  // The shipped Laplacian benchmark: f = 2 pi^2 sin(pi x) sin(pi y).
  const ManufacturedCase bell = make_default_bellman_benchmark();
  const double pi = std::acos(-1.0);
  for (const Point& x : sample_in_domain(bell.problem.domain, 20, 3)) {
    const double expected =
        2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
    CHECK(std::abs(bell.problem.coeffs.f(0, 0, x) - expected) <= 1e-12);
  }
  CHECK(construction_check(bell) <= 1e-12);
  CHECK(validate_problem(bell.problem).ok);

  // Saddle tables: alpha - beta has upper value zero, alpha * beta does not.
  const ManufacturedCase saddle = make_default_saddle_benchmark();
  CHECK(construction_check(saddle) <= 1e-12);
  CHECK(validate_problem(saddle.problem).ok);
  CHECK(to_string(saddle.family) == "isaacs-saddle");

  IsaacsProblem game = saddle.problem;
  CHECK_THROWS_AS(make_isaacs_saddle_case(
                      constant_fn(0.0), game,
                      {{1.0, -1.0}, {-1.0, 1.0}}),  // sup inf = -1
                  SaddleValueNonzero);
  CHECK_THROWS_AS(make_bellman_case(constant_fn(0.0), game),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_isaacs_saddle_case(constant_fn(0.0), game, {{0.0, 0.0}}),
      std::invalid_argument);

  CHECK(validate_problem(make_rough_benchmark()).ok);
}

TEST_CASE("grid-rate study shows second-order decay on the disk benchmark") {
  const ManufacturedCase bell = make_default_bellman_benchmark();
  const std::vector<double> hs = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0};
  const RateReport report = run_grid_rate(bell, hs, default_stencil(2));
  REQUIRE(report.errors.size() == 3);
  CHECK(report.points_used == 3);
  for (std::size_t i = 1; i < report.errors.size(); ++i)
    CHECK(report.errors[i] <= 1.05 * report.errors[i - 1]);
  CHECK(report.fitted_exponent >= 1.5);
  CHECK(report.fit_residual <= 0.1);

  // Validation of the h sequence and of corrupted cases.
  CHECK_THROWS_AS(run_grid_rate(bell, {0.1, 0.2}, default_stencil(2)),
                  ConfigError);
  CHECK_THROWS_AS(run_grid_rate(bell, {0.1}, default_stencil(2)), ConfigError);
  ManufacturedCase corrupted = bell;
  corrupted.problem.coeffs.f = [](std::size_t, std::size_t, const Point&) {
    return 1.0;
  };
  CHECK_THROWS_AS(run_grid_rate(corrupted, hs, default_stencil(2)), ConfigError);
}

TEST_CASE("truncation study: ordering, monotone gaps, trivial data") {
  const IsaacsProblem rough = make_rough_benchmark();
  const Grid grid = build_grid(rough.domain, default_stencil(2), 1.0 / 8.0);
  const std::vector<double> levels = {2.0, 4.0, 8.0};
  const RateReport report = run_sandwich(rough, grid, levels);
  REQUIRE(report.errors.size() == 3);
  REQUIRE(report.reference_gaps.size() == 3);
  for (std::size_t i = 1; i < report.errors.size(); ++i)
    CHECK(report.errors[i] <= 1.05 * report.errors[i - 1]);
  if (report.points_used >= 2) CHECK(report.fitted_exponent > 0.0);
  CHECK(!report.caveat.empty());

  CHECK_THROWS_AS(run_sandwich(rough, grid, {0.5, 2.0}), ConfigError);
  CHECK_THROWS_AS(run_sandwich(rough, grid, {4.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(run_sandwich(rough, grid, {}), ConfigError);

  // Zero data: both truncated solutions vanish, so every gap is zero.
  IsaacsProblem trivial = rough;
  trivial.coeffs = make_constant_field({{Eigen::Matrix2d::Identity()}},
                                       {{Eigen::Vector2d::Zero()}}, {{0.1}},
                                       {{0.0}}, hoelder_gamma(0.1), 0.5);
  trivial.controls_a.labels = {"only"};
  trivial.controls_b.labels = {"only"};
  const RateReport quiet = run_sandwich(trivial, grid, levels);
  for (double gap : quiet.errors) CHECK(gap == 0.0);
  CHECK(quiet.points_used == 0);
}

TEST_CASE("boundary-growth constant is finite and vanishes on zero data") {
  const IsaacsProblem rough = make_rough_benchmark();
  const Grid grid = build_grid(rough.domain, default_stencil(2), 1.0 / 8.0);
  const double nhat = fit_boundary_constant(rough, grid, 4.0);
  CHECK(std::isfinite(nhat));
  CHECK(nhat > 0.0);

  IsaacsProblem trivial = rough;
  trivial.coeffs = make_constant_field({{Eigen::Matrix2d::Identity()}},
                                       {{Eigen::Vector2d::Zero()}}, {{0.1}},
                                       {{0.0}}, hoelder_gamma(0.1), 0.5);
  trivial.controls_a.labels = {"only"};
  trivial.controls_b.labels = {"only"};
  CHECK(fit_boundary_constant(trivial, grid, 4.0) == 0.0);
}

TEST_CASE("barrier tuning and verification on the unit disk") {
  const Domain disk = make_disk(pt(0.0, 0.0), 1.0);
  const Barrier barrier = tune_barrier(disk, 0.2, 2.0);
  // Doubling from 1: mu must satisfy delta * mu > k1 (tail positivity) and
  // 2 delta mu^2 >= 1 (origin), so the first admissible power of two is 16.
  CHECK(barrier.mu == 16.0);
  CHECK(barrier.R > 2.0);

  const double slack = verify_barrier(barrier, disk, 0.2, 2.0, 10'000);
  CHECK(slack <= -1.0 + 1e-9);

  // Doubling mu cannot worsen the certificate (same sample set).
  Barrier twice = barrier;
  twice.mu *= 2.0;
  const double slack2 = verify_barrier(twice, disk, 0.2, 2.0, 10'000);
  CHECK(slack2 <= slack + 1e-12);

  Barrier weak = barrier;
  weak.mu = 1.0;
  CHECK_THROWS_AS(verify_barrier(weak, disk, 0.2, 2.0, 1000), BarrierInvalid);
}

TEST_CASE("barrier derivatives match the closed radial form") {
  Barrier b;
  b.mu = 2.0;
  b.R = 4.0;

  // At the origin the gradient vanishes and the Hessian is -mu^2 I, so the
  // slack with a = delta I is exactly -2 delta mu^2.
  CHECK(b.gradient(pt(0.0, 0.0)).norm() == 0.0);
  const Eigen::MatrixXd h0 = b.hessian(pt(0.0, 0.0));
  CHECK(std::abs(h0(0, 0) + b.mu * b.mu) <= 1e-14);
  CHECK(std::abs(h0(1, 1) + b.mu * b.mu) <= 1e-14);
  CHECK(std::abs(h0(0, 1)) <= 1e-14);
  const double delta = 0.2;
  const double origin_slack = delta * h0.trace();
  CHECK(std::abs(origin_slack - (-2.0 * delta * b.mu * b.mu)) <= 1e-12);

  // Away from the origin, compare against the hand-derived entries
  // D_ij = -mu^2 (x_i x_j / r^2) cosh(mu r) - mu (d_ij/r - x_i x_j/r^3) sinh(mu r).
  const Point x = pt(0.3, 0.4);
  const double r = 0.5;
  const Eigen::MatrixXd hess = b.hessian(x);
  const Eigen::VectorXd grad = b.gradient(x);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(grad[i] - (-b.mu * std::sinh(b.mu * r) * x[i] / r)) <= 1e-10);
    for (int j = 0; j < 2; ++j) {
      const double kron = i == j ? 1.0 : 0.0;
      const double expected =
          -b.mu * b.mu * (x[i] * x[j] / (r * r)) * std::cosh(b.mu * r) -
          b.mu * (kron / r - x[i] * x[j] / (r * r * r)) * std::sinh(b.mu * r);
      CHECK(std::abs(hess(i, j) - expected) <= 1e-10);
    }
  }

  // Cross-check with central finite differences of the scalar value.
  const double step = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Point xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const double fd = (b.value(xp) - b.value(xm)) / (2.0 * step);
    CHECK(std::abs(fd - grad[i]) <= 1e-6);
  }
}

TEST_CASE("mollification: normalization, affine exactness, escape checks") {
  const Point lo = pt(-0.5, -0.5), hi = pt(0.5, 0.5);
  const double spacing = 1.0 / 64.0;

  const FineLattice constant = sample_box(
      [](const Point&) { return 0.7; }, lo, hi, spacing);
  CHECK(constant.nx == 65);
  CHECK(constant.ny == 65);
  CHECK(std::abs(mollify_at(constant, 0.1, pt(0.0, 0.0)) - 0.7) <= 1e-10);
  CHECK(std::abs(mollify_at(constant, 0.1, pt(0.25, -0.125)) - 0.7) <= 1e-10);

  const FineLattice affine = sample_box(
      [](const Point& x) { return 0.3 * x[0] - 0.8 * x[1] + 0.1; }, lo, hi,
      spacing);
  for (const Point& x : {pt(0.0, 0.0), pt(0.25, 0.125), pt(-0.125, -0.25)}) {
    const double exact = 0.3 * x[0] - 0.8 * x[1] + 0.1;
    CHECK(std::abs(mollify_at(affine, 0.2, x) - exact) <= 1e-8);
  }

  CHECK_THROWS_AS(mollify_at(affine, 0.1, pt(0.45, 0.0)), SupportEscapesRegion);
  CHECK_THROWS_AS(mollify_at(affine, 0.2, pt(0.0, -0.4)), SupportEscapesRegion);
  // Radius below the lattice resolution at an off-lattice point: no sample
  // falls inside the kernel support.
  CHECK_THROWS_AS(
      mollify_at(affine, spacing / 4.0,
                 pt(spacing / 2.0, spacing / 2.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(mollify_at(affine, -0.1, pt(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("mollification error of |x|^1.3 scales like eps^1.3") {
  const double expo = 1.3;
  const FineLattice samples = sample_box(
      [expo](const Point& x) { return std::pow(x.norm(), expo); },
      pt(-0.5, -0.5), pt(0.5, 0.5), 1.0 / 512.0);

  std::vector<Point> window;
  for (int i = -6; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j)
      window.push_back(pt(i / 32.0, j / 32.0));  // lattice-aligned, |x| <= 0.27

  const std::vector<double> eps_seq = {0.1, 0.05, 0.025};
  std::vector<double> sup_err;
  for (double eps : eps_seq) {
    const std::vector<double> smooth = mollify(samples, eps, window);
    double worst = 0.0;
    for (std::size_t k = 0; k < window.size(); ++k)
      worst = std::max(worst,
                       std::abs(smooth[k] - std::pow(window[k].norm(), expo)));
    sup_err.push_back(worst);
  }
  const PowerFit fit = fit_loglog(eps_seq, sup_err, 0.0);
  CHECK(std::abs(fit.slope - expo) <= 0.15);
}

TEST_CASE("interior seminorm diagnostic") {
  const Domain disk = make_disk(pt(0.0, 0.0), 1.0);
  const Grid grid = build_grid(disk, default_stencil(2), 1.0 / 16.0);
  const std::vector<double> eps_seq = {0.4, 0.2, 0.1};

  // Affine data: the discrete gradient is constant, seminorm zero.
  const GridFunction flat =
      sample(grid, affine_fn(Eigen::Vector2d(0.4, -0.9), 0.2).value);
  for (const SeminormRow& row : interior_seminorm_diagnostic(flat, eps_seq, 0.1)) {
    CHECK(row.seminorm <= 1e-10);
    CHECK(row.product <= 1e-10);
  }

  // Smooth data: seminorm bounded by the analytic Lipschitz bound of the
  // gradient inflated by the Hoelder rescaling over the domain diameter.
  const double pi = std::acos(-1.0);
  const GridFunction smooth = sample(grid, [pi](const Point& x) {
    return std::sin(pi * x[0]) * std::sin(pi * x[1]);
  });
  for (const SeminormRow& row :
       interior_seminorm_diagnostic(smooth, eps_seq, 0.1))
    CHECK(row.seminorm <= 40.0);

  // Gradient blow-up like dist^(-1/2): the raw seminorm grows toward the
  // boundary. (Its eps^{1+chi}-weighted product stays bounded, as the
  // interior estimate allows for this mild a pole.)
  const GridFunction spike = sample(grid, [](const Point& x) {
    return std::sqrt(std::max(1e-12, 1.0 - x.norm()));
  });
  const std::vector<SeminormRow> rows =
      interior_seminorm_diagnostic(spike, eps_seq, 0.1);
  CHECK(rows[2].seminorm > rows[0].seminorm);

  // Gradient blow-up like dist^(-3/2) exceeds what the interior estimate
  // tolerates, and the weighted product now grows as eps shrinks: this is
  // the signal the diagnostic exists to expose.
  const GridFunction pole = sample(grid, [](const Point& x) {
    return 1.0 / std::sqrt(std::max(1e-12, 1.0 - x.squaredNorm()));
  });
  const std::vector<SeminormRow> hot =
      interior_seminorm_diagnostic(pole, eps_seq, 0.1);
  CHECK(hot[2].product > hot[0].product);
  CHECK(hot[2].seminorm > hot[0].seminorm);

  CHECK_THROWS_AS(interior_seminorm_diagnostic(flat, eps_seq, 1.5),
                  std::invalid_argument);
}
