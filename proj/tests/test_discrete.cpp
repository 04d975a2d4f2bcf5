#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "isaacs/coefficients.hpp"
#include "isaacs/decomposition.hpp"
#include "isaacs/discrete.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/geometry.hpp"
#include "isaacs/grid.hpp"
#include "isaacs/problem.hpp"

using namespace isaacs;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

double uniform01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

GridFunction random_function(const Grid& grid, std::mt19937_64& rng,
                             double scale = 1.0) {
  GridFunction u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    u[i] = scale * (2.0 * uniform01(rng) - 1.0);
  return u;
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

IsaacsProblem singleton_problem(const Domain& dom, const Eigen::Matrix2d& a,
                                const Eigen::Vector2d& b, double c, double f) {
  IsaacsProblem p;
  p.domain = dom;
  p.controls_a.labels = {"a0"};
  p.controls_b.labels = {"b0"};
  p.coeffs = make_constant_field({{a}}, {{b}}, {{c}}, {{f}}, 0.45, 0.5);
  p.g = constant_fn(0.0);
  p.bounds = {0.2, 20.0};
  return p;
}

// Independent evaluation of one control pair directly from the defining
// sums, using coordinate lookups instead of the neighbor table.
double brute_force_row(const IsaacsProblem& prob, const Grid& grid,
                       const GridFunction& u, std::size_t i, std::size_t alpha,
                       std::size_t beta) {
  const Point& x = grid.points[i];
  const double h = grid.h;
  const auto a = decompose_matrix(prob.coeffs.a(alpha, beta, x), grid.stencil, 0.0);
  const Eigen::VectorXd bvec = prob.coeffs.b(alpha, beta, x);
  double total = -prob.coeffs.c(alpha, beta, x) * u[i] +
                 prob.coeffs.f(alpha, beta, x);
  for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
    const LatticeVector& l = grid.stencil.vectors[k];
    LatticeVector cp = grid.coords[i], cm = grid.coords[i];
    for (std::size_t t = 0; t < l.size(); ++t) {
      cp[t] += l[t];
      cm[t] -= l[t];
    }
    total += a[k] * (u.at(cp) - 2.0 * u[i] + u.at(cm)) / (h * h);
  }
  for (int axis = 0; axis < 2; ++axis) {
    const double b = bvec[axis];
    LatticeVector c = grid.coords[i];
    c[axis] += b >= 0 ? 1 : -1;
    total += std::abs(b) * (u.at(c) - u[i]) / h;
  }
  return total;
}

}  // namespace

TEST_CASE("one-sided and second difference quotients") {
  const Grid grid = build_grid(make_disk(pt(0, 0), 1.0), default_stencil(2), 0.1);

  SUBCASE("affine functions have exact quotients") {
    const Eigen::Vector2d p(1.3, -0.7);
    const GridFunction u = sample(grid, [&](const Point& x) {
      return p[0] * x[0] + p[1] * x[1] + 0.4;
    });
    for (std::size_t i = 0; i < grid.n_interior; i += 3) {
      for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
        const LatticeVector& l = grid.stencil.vectors[k];
        const double pl = p[0] * l[0] + p[1] * l[1];
        CHECK(forward_difference(u, i, k, +1) ==
              doctest::Approx(pl).epsilon(1e-11));
        CHECK(forward_difference(u, i, k, -1) ==
              doctest::Approx(-pl).epsilon(1e-11));
        CHECK(second_difference(u, i, k) ==
              doctest::Approx(0.0).epsilon(1e-9).scale(1));
      }
    }
  }

  SUBCASE("constants have zero quotients") {
    const GridFunction u = sample(grid, [](const Point&) { return 2.5; });
    CHECK(forward_difference(u, 0, 0, +1) == 0.0);
    CHECK(second_difference(u, 0, 2) == 0.0);
  }

  SUBCASE("squared norm along e1") {
    const GridFunction u =
        sample(grid, [](const Point& x) { return x.squaredNorm(); });
    const std::int64_t i = grid.ordinal_of({2, 0});
    REQUIRE(i >= 0);
    const std::size_t slot = grid.stencil.basis_slot(0);
    CHECK(forward_difference(u, static_cast<std::size_t>(i), slot, +1) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("quadratics have exact second quotients at any h") {
    Eigen::Matrix2d M;
    M << 1.4, -0.6, -0.6, 0.9;
    const GridFunction u = sample(grid, [&](const Point& x) {
      const Eigen::Vector2d v(x[0], x[1]);
      return 0.5 * v.dot(M * v) + 0.3 * x[0];
    });
    for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
      const LatticeVector& lv = grid.stencil.vectors[k];
      const Eigen::Vector2d l(static_cast<double>(lv[0]),
                              static_cast<double>(lv[1]));
      CHECK(second_difference(u, 1, k) ==
            doctest::Approx(l.dot(M * l)).epsilon(1e-9));
    }
  }

  SUBCASE("sine second quotient with Taylor remainder") {
    const Grid fine =
        build_grid(make_box(pt(-0.1, -0.1), pt(0.1, 0.1)), axis_stencil(2), 0.01);
    const GridFunction u0 = sample(fine, [](const Point& x) {
      return std::sin(x[0]);
    });
    const std::int64_t c0 = fine.ordinal_of({0, 0});
    REQUIRE(c0 >= 0);
    CHECK(std::abs(second_difference(u0, static_cast<std::size_t>(c0), 0)) <=
          1e-10);

    const Grid shifted =
        build_grid(make_box(pt(1.4, -0.1), pt(1.7, 0.1)), axis_stencil(2), 0.01);
    const GridFunction u1 = sample(shifted, [](const Point& x) {
      return std::sin(x[0]);
    });
    const std::int64_t c1 = shifted.ordinal_of({157, 0});  // x = 1.57, near pi/2
    REQUIRE(c1 >= 0);
    const double d2 = second_difference(u1, static_cast<std::size_t>(c1), 0);
    // Taylor: |d2 + sin(x)| <= h^2 / 12 * max|sin''''| = 1e-4 / 12.
    CHECK(std::abs(d2 + std::sin(1.57)) <= 1e-4 / 12.0 + 1e-10);
    CHECK(d2 == doctest::Approx(-1.0).epsilon(1e-4));
  }

  SUBCASE("non-interior ordinals are rejected") {
    const GridFunction u(grid);
    CHECK_THROWS_AS(forward_difference(u, grid.n_interior, 0, +1), MissingNeighbor);
    CHECK_THROWS_AS(second_difference(u, grid.size() - 1, 0), MissingNeighbor);
  }
}

TEST_CASE("scheme tables and the discrete sup-inf operator") {
  const Domain box = make_box(pt(0, 0), pt(1, 1));

  SUBCASE("affine data leaves only drift and source") {
    IsaacsProblem p;
    p.domain = box;
    p.controls_a.labels = {"a0", "a1"};
    p.controls_b.labels = {"b0", "b1"};
    p.coeffs = make_constant_field(
        {{Eigen::Matrix2d::Identity(), 1.3 * Eigen::Matrix2d::Identity()},
         {Eigen::Matrix2d::Identity(), 0.8 * Eigen::Matrix2d::Identity()}},
        {{Eigen::Vector2d(0.4, -0.3), Eigen::Vector2d(-1.0, 0.2)},
         {Eigen::Vector2d(0.0, 1.1), Eigen::Vector2d(0.6, 0.6)}},
        {{0, 0}, {0, 0}},
        {{0.9, -0.4}, {0.1, 0.7}}, 0.45, 0.5);
    p.g = constant_fn(0.0);
    p.bounds = {0.2, 20.0};
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    const SchemeTables tables = build_scheme_tables(p, grid);

    const Eigen::Vector2d slope(0.7, -1.2);
    const GridFunction u = sample(grid, [&](const Point& x) {
      return slope[0] * x[0] + slope[1] * x[1] + 0.25;
    });
    const std::int64_t i = grid.ordinal_of({4, 4});
    REQUIRE(i >= 0);
    double expected = -1e300;
    const double table_b[2][2][2] = {{{0.4, -0.3}, {-1.0, 0.2}},
                                     {{0.0, 1.1}, {0.6, 0.6}}};
    const double table_f[2][2] = {{0.9, -0.4}, {0.1, 0.7}};
    for (int al = 0; al < 2; ++al) {
      double row = 1e300;
      for (int be = 0; be < 2; ++be)
        row = std::min(row, table_b[al][be][0] * slope[0] +
                                table_b[al][be][1] * slope[1] + table_f[al][be]);
      expected = std::max(expected, row);
    }
    CHECK(eval_scheme(tables, u, static_cast<std::size_t>(i)).value ==
          doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("isotropic second-order on the squared norm gives twice the trace") {
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    auto p = singleton_problem(box, Eigen::Matrix2d::Identity(), {0, 0}, 0, 0);
    const SchemeTables tables = build_scheme_tables(p, grid);
    const GridFunction u =
        sample(grid, [](const Point& x) { return x.squaredNorm(); });
    const std::int64_t i = grid.ordinal_of({4, 3});
    REQUIRE(i >= 0);
    CHECK(eval_scheme(tables, u, static_cast<std::size_t>(i)).value ==
          doctest::Approx(4.0).epsilon(1e-11));
  }

  SUBCASE("random data matches exhaustive control enumeration") {
    IsaacsProblem p;
    p.domain = box;
    p.controls_a.labels = {"a0", "a1"};
    p.controls_b.labels = {"b0", "b1"};
    p.coeffs = make_smooth_periodic_field(2, 2, 0.45, 0.5);
    p.g = constant_fn(0.0);
    p.bounds = {0.2, 20.0};
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    REQUIRE(grid.n_interior == 25);  // 5 x 5 block of interior lattice points
    const SchemeTables tables = build_scheme_tables(p, grid);

    std::mt19937_64 rng(17);
    const GridFunction u = random_function(grid, rng);
    for (std::size_t i = 0; i < grid.n_interior; ++i) {
      double expected = -1e300;
      std::size_t exp_alpha = 0, exp_beta = 0;
      for (std::size_t al = 0; al < 2; ++al) {
        double row = 1e300;
        std::size_t row_beta = 0;
        for (std::size_t be = 0; be < 2; ++be) {
          const double v = brute_force_row(p, grid, u, i, al, be);
          if (v < row) {
            row = v;
            row_beta = be;
          }
        }
        if (row > expected) {
          expected = row;
          exp_alpha = al;
          exp_beta = row_beta;
        }
      }
      const SchemeValue got = eval_scheme(tables, u, i);
      CHECK(got.value == doctest::Approx(expected).epsilon(1e-10));
      CHECK(got.alpha == exp_alpha);
      CHECK(got.beta == exp_beta);
    }
  }

  SUBCASE("duplicate controls resolve to the first index") {
    IsaacsProblem p;
    p.domain = box;
    p.controls_a.labels = {"a0", "a1"};
    p.controls_b.labels = {"b0", "b1"};
    const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
    const Eigen::Vector2d z(0, 0);
    p.coeffs = make_constant_field({{I2, I2}, {I2, I2}}, {{z, z}, {z, z}},
                                   {{0, 0}, {0, 0}}, {{0.3, 0.3}, {0.3, 0.3}},
                                   0.45, 0.5);
    p.g = constant_fn(0.0);
    p.bounds = {0.2, 20.0};
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    const SchemeTables tables = build_scheme_tables(p, grid);
    std::mt19937_64 rng(3);
    const GridFunction u = random_function(grid, rng);
    const SchemeValue v = eval_scheme(tables, u, 0);
    CHECK(v.alpha == 0);
    CHECK(v.beta == 0);
  }

  SUBCASE("rows are M-matrix rows") {
    IsaacsProblem p;
    p.domain = box;
    p.controls_a.labels = {"a0", "a1"};
    p.controls_b.labels = {"b0", "b1", "b2"};
    SmoothFamilyParams params;
    params.zeroth = 0.4;
    p.coeffs = make_smooth_periodic_field(2, 3, 0.45, 0.5, params);
    p.g = constant_fn(0.0);
    p.bounds = {0.2, 20.0};
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    const SchemeTables tables = build_scheme_tables(p, grid);
    REQUIRE(tables.rows.size() == grid.n_interior * 6);
    for (std::size_t r = 0; r < tables.rows.size(); ++r) {
      const LinearRow& row = tables.rows[r];
      double off = 0.0;
      for (std::size_t k = 0; k < row.cp.size(); ++k) {
        CHECK(row.cp[k] >= 0.0);
        CHECK(row.cm[k] >= 0.0);
        off += row.cp[k] + row.cm[k];
      }
      CHECK(row.center <= 0.0);
      CHECK(row.center + off <= 1e-9);  // row sum = -c <= 0
    }
    CHECK(tables.max_row_magnitude() > 0.0);
  }

  SUBCASE("upward neighbor perturbations never decrease the value") {
    IsaacsProblem p;
    p.domain = box;
    p.controls_a.labels = {"a0", "a1"};
    p.controls_b.labels = {"b0", "b1"};
    p.coeffs = make_smooth_periodic_field(2, 2, 0.45, 0.5);
    p.g = constant_fn(0.0);
    p.bounds = {0.2, 20.0};
    const Grid grid = build_grid(box, default_stencil(2), 0.125);
    const SchemeTables tables = build_scheme_tables(p, grid);

    // Also exercise strong drift, where a centered scheme would lose
    // monotonicity but the one-sided splitting must not.
    auto strong = singleton_problem(box, Eigen::Matrix2d::Identity(),
                                    {15.0, -11.0}, 0.5, 0.2);
    const SchemeTables strong_tables = build_scheme_tables(strong, grid);

    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      GridFunction u = random_function(grid, rng);
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      for (const SchemeTables* t : {&tables, &strong_tables}) {
        const double base = eval_scheme(*t, u, i).value;
        for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
          for (int sign : {+1, -1}) {
            const auto n = static_cast<std::size_t>(grid.neighbor(i, k, sign));
            GridFunction w = u;
            w[n] += 1e-3;
            CHECK(eval_scheme(*t, w, i).value >= base - 1e-12);
          }
        }
        GridFunction w = u;
        w[i] += 1e-3;
        CHECK(eval_scheme(*t, w, i).value <= base + 1e-12);
      }
    }
  }
}

TEST_CASE("continuous extremal operator") {
  const PucciParams params{0.5, 2.0};

  SUBCASE("fixed values") {
    CHECK(eval_pucci(Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(), 0.0,
                     params) == 0.0);
    CHECK(eval_pucci(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 0.0,
                     params) == doctest::Approx(4.0).epsilon(1e-14));
    // mixed signs: eigenvalues +1 and -1 -> 1/0.5 - 0.5 = 1.5
    Eigen::Matrix2d M;
    M << 0, 1, 1, 0;
    CHECK(eval_pucci(M, Eigen::Vector2d(3, 4), 2.0, params) ==
          doctest::Approx(1.5 + 2.0 * 5.0 - 2.0 * 2.0).epsilon(1e-14));
  }

  SUBCASE("positive homogeneity of degree one") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Matrix2d M;
      const double off = 2.0 * uniform01(rng) - 1.0;
      M << 2.0 * uniform01(rng) - 1.0, off, off, 2.0 * uniform01(rng) - 1.0;
      const Eigen::Vector2d p(uniform01(rng), -uniform01(rng));
      const double u = 2.0 * uniform01(rng) - 1.0;
      const double s = 0.1 + 5.0 * uniform01(rng);
      CHECK(eval_pucci(s * M, s * p, s * u, params) ==
            doctest::Approx(s * eval_pucci(M, p, u, params)).epsilon(1e-12));
    }
  }

  SUBCASE("ordering against the pure second-order form") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Matrix2d M;
      const double off = 2.0 * uniform01(rng) - 1.0;
      M << 2.0 * uniform01(rng) - 1.0, off, off, 2.0 * uniform01(rng) - 1.0;
      const Eigen::Vector2d p(2.0 * uniform01(rng) - 1.0, uniform01(rng));
      const double u = 2.0 * uniform01(rng) - 1.0;
      const double p0 = eval_pucci(M, Eigen::Vector2d::Zero(), 0.0, params);
      const double pg = eval_pucci(M, p, 0.0, params);
      const double pu = eval_pucci(M, p, u, params);
      CHECK(p0 <= pg + 1e-14);
      CHECK(pg <= pu + params.k1 * std::max(u, 0.0) + 1e-14);
    }
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(eval_pucci(Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                               0.0, PucciParams{0.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval_pucci(Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                               0.0, PucciParams{1.5, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(certify_pucci_box(PucciParams{0.25, -1.0}, extended_stencil()),
                    std::invalid_argument);
  }
}

TEST_CASE("certified coefficient box") {
  const Stencil ext = extended_stencil();
  const PucciBox box = certify_pucci_box(PucciParams{0.25, 2.0}, ext);
  CHECK(box.q_lo == doctest::Approx(0.002266399120958515).epsilon(1e-12));
  REQUIRE(box.q_hi.size() == ext.size());
  for (std::size_t k = 0; k < ext.size(); ++k) CHECK(box.q_hi[k] >= box.q_lo);
  // The isotropic extreme I / delta_hat must fit inside the box.
  const auto iso = decompose_matrix(4.0 * Eigen::Matrix2d::Identity(), ext, 0.0);
  for (std::size_t k = 0; k < ext.size(); ++k) CHECK(box.q_hi[k] >= iso[k] - 1e-12);

  // Narrower bands certify a strictly positive floor on the plain stencil.
  const PucciBox d4 = certify_pucci_box(PucciParams{0.5, 1.0}, default_stencil(2));
  CHECK(d4.q_lo > 0.0);
}

TEST_CASE("gradient envelopes") {
  const Grid grid = build_grid(make_disk(pt(0, 0), 2.0), default_stencil(2), 0.5);
  const std::int64_t c = grid.ordinal_of({0, 0});
  REQUIRE(c >= 0);
  const auto i = static_cast<std::size_t>(c);
  GridFunction u(grid);
  u[static_cast<std::size_t>(grid.neighbor(i, grid.stencil.basis_slot(0), +1))] = 0.2;
  u[static_cast<std::size_t>(grid.neighbor(i, grid.stencil.basis_slot(0), -1))] = 0.3;
  u[static_cast<std::size_t>(grid.neighbor(i, grid.stencil.basis_slot(1), +1))] = -0.1;
  u[static_cast<std::size_t>(grid.neighbor(i, grid.stencil.basis_slot(1), -1))] = -0.2;
  // Axis 1: one-sided slopes +0.4 and +0.6 -> envelope 0.6.
  // Axis 2: both slopes negative -> upper envelope 0, lower -0.4.
  CHECK(gradient_bound_upper(u, i) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(gradient_bound_lower(u, i) == doctest::Approx(-0.4).epsilon(1e-14));

  SUBCASE("upper envelope dominates and reflects") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
      GridFunction w = random_function(grid, rng);
      GridFunction neg(grid);
      for (std::size_t j = 0; j < grid.size(); ++j) neg[j] = -w[j];
      CHECK(gradient_bound_upper(w, i) >= 0.0);
      CHECK(gradient_bound_lower(w, i) <= 0.0);
      CHECK(gradient_bound_lower(w, i) ==
            doctest::Approx(-gradient_bound_upper(neg, i)).epsilon(1e-14));
    }
  }

  SUBCASE("envelopes converge to the gradient norm on smooth functions") {
    for (double h : {0.2, 0.1, 0.05}) {
      const Grid g = build_grid(make_disk(pt(0, 0), 2.0), default_stencil(2), h);
      const GridFunction w = sample(g, [](const Point& x) {
        return std::sin(1.1 * x[0]) + 0.5 * std::cos(0.7 * x[1]);
      });
      const std::int64_t o = g.ordinal_of({1, 1});
      REQUIRE(o >= 0);
      const Point& x = g.points[static_cast<std::size_t>(o)];
      const Eigen::Vector2d grad(1.1 * std::cos(1.1 * x[0]),
                                 -0.35 * std::sin(0.7 * x[1]));
      CHECK(std::abs(gradient_bound_upper(w, static_cast<std::size_t>(o)) -
                     grad.norm()) <= 2.0 * h);
      CHECK(std::abs(gradient_bound_lower(w, static_cast<std::size_t>(o)) +
                     grad.norm()) <= 2.0 * h);
    }
  }
}

TEST_CASE("discrete extremal operator") {
  const Grid grid =
      build_grid(make_disk(pt(0, 0), 1.2), extended_stencil(), 0.2);
  REQUIRE(grid.n_interior > 0);
  const PucciBox box = certify_pucci_box(PucciParams{0.25, 2.0}, grid.stencil);

  SUBCASE("constants see only the zeroth-order term") {
    const GridFunction u = sample(grid, [](const Point&) { return 0.7; });
    CHECK(eval_discrete_pucci(box, u, 0) == -2.0 * 0.7);
    CHECK(eval_discrete_pucci_lower(box, u, 0) == -2.0 * 0.7);
  }

  SUBCASE("matches corner enumeration of the coefficient box") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
      const GridFunction u = random_function(grid, rng);
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      const std::size_t m = grid.stencil.size();
      std::vector<double> d2(m);
      for (std::size_t k = 0; k < m; ++k) d2[k] = second_difference(u, i, k);
      double best_hi = -1e300, best_lo = 1e300;
      for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k)
          s += ((mask >> k) & 1 ? box.q_hi[k] : box.q_lo) * d2[k];
        best_hi = std::max(best_hi, s);
        best_lo = std::min(best_lo, s);
      }
      const double up = best_hi + 2.0 * gradient_bound_upper(u, i) - 2.0 * u[i];
      const double lo = best_lo + 2.0 * gradient_bound_lower(u, i) - 2.0 * u[i];
      CHECK(eval_discrete_pucci(box, u, i) ==
            doctest::Approx(up).epsilon(1e-12));
      CHECK(eval_discrete_pucci_lower(box, u, i) ==
            doctest::Approx(lo).epsilon(1e-12));
    }
  }

  SUBCASE("positive-curvature profile activates every upper bound") {
    const GridFunction u =
        sample(grid, [](const Point& x) { return 0.5 * x.squaredNorm(); });
    const std::int64_t c = grid.ordinal_of({0, 0});
    REQUIRE(c >= 0);
    const auto i = static_cast<std::size_t>(c);
    double expected = 0.0;
    for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
      const LatticeVector& l = grid.stencil.vectors[k];
      expected +=
          box.q_hi[k] * static_cast<double>(l[0] * l[0] + l[1] * l[1]);
    }
    // At the origin the one-sided slopes are all h/2.
    expected += 2.0 * std::sqrt(2.0) * (grid.h / 2.0) - 2.0 * u[i];
    CHECK(eval_discrete_pucci(box, u, i) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("sign reflection maps the upper form onto the lower form") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
      const GridFunction u = random_function(grid, rng);
      GridFunction neg(grid);
      for (std::size_t j = 0; j < grid.size(); ++j) neg[j] = -u[j];
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      CHECK(eval_discrete_pucci(box, neg, i) ==
            doctest::Approx(-eval_discrete_pucci_lower(box, u, i))
                .epsilon(1e-13));
    }
  }

  SUBCASE("monotone in neighbors, decreasing in the center") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 15; ++trial) {
      GridFunction u = random_function(grid, rng);
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      const double base_up = eval_discrete_pucci(box, u, i);
      const double base_lo = eval_discrete_pucci_lower(box, u, i);
      for (std::size_t k = 0; k < grid.stencil.size(); ++k) {
        for (int sign : {+1, -1}) {
          GridFunction w = u;
          w[static_cast<std::size_t>(grid.neighbor(i, k, sign))] += 1e-3;
          CHECK(eval_discrete_pucci(box, w, i) >= base_up - 1e-12);
          CHECK(eval_discrete_pucci_lower(box, w, i) >= base_lo - 1e-12);
        }
      }
      GridFunction w = u;
      w[i] += 1e-3;
      CHECK(eval_discrete_pucci(box, w, i) <= base_up + 1e-12);
      CHECK(eval_discrete_pucci_lower(box, w, i) <= base_lo + 1e-12);
    }
  }

  SUBCASE("tangent rows reproduce the value and stay monotone") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 25; ++trial) {
      const GridFunction u = random_function(grid, rng);
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      for (bool lower : {false, true}) {
        const LinearRow row = linearize_pucci(box, u, i, lower);
        const double direct = lower ? eval_discrete_pucci_lower(box, u, i)
                                    : eval_discrete_pucci(box, u, i);
        CHECK(eval_row(row, grid, u, i) ==
              doctest::Approx(direct).epsilon(1e-12));
        double off = 0.0;
        for (std::size_t k = 0; k < row.cp.size(); ++k) {
          CHECK(row.cp[k] >= 0.0);
          CHECK(row.cm[k] >= 0.0);
          off += row.cp[k] + row.cm[k];
        }
        CHECK(row.center <= -box.params.k1 + 1e-12);
        CHECK(row.center + off <= 1e-10);
        CHECK(-row.center <= pucci_row_magnitude(box, grid) + 1e-10);

        // Support-function property: the tangent underestimates (upper form)
        // or overestimates (lower form) at every other grid function.
        const GridFunction w = random_function(grid, rng);
        const double tangent_at_w = eval_row(row, grid, w, i);
        if (lower)
          CHECK(eval_discrete_pucci_lower(box, w, i) <= tangent_at_w + 1e-10);
        else
          CHECK(eval_discrete_pucci(box, w, i) >= tangent_at_w - 1e-10);
      }
    }
  }
}

TEST_CASE("truncated operators") {
  const Domain disk = make_disk(pt(0, 0), 1.2);
  IsaacsProblem p;
  p.domain = disk;
  p.controls_a.labels = {"a0", "a1"};
  p.controls_b.labels = {"b0", "b1"};
  p.coeffs = make_smooth_periodic_field(2, 2, 0.45, 0.5);
  p.g = constant_fn(0.0);
  p.bounds = {0.2, 20.0};
  const Grid grid = build_grid(disk, default_stencil(2), 0.15);
  const SchemeTables tables = build_scheme_tables(p, grid);
  const PucciBox box = certify_pucci_box(PucciParams{0.1, 2.0}, grid.stencil);

  SUBCASE("huge K leaves only the sup-inf branch") {
    std::mt19937_64 rng(61);
    const GridFunction u = random_function(grid, rng);
    for (std::size_t i = 0; i < grid.n_interior; i += 5) {
      const double K = 10.0 * (std::abs(eval_discrete_pucci(box, u, i)) +
                               std::abs(eval_discrete_pucci_lower(box, u, i)) +
                               std::abs(eval_scheme(tables, u, i).value) + 1.0);
      const TruncatedValue up = eval_truncated_upper(tables, box, u, i, K);
      const TruncatedValue lo = eval_truncated_lower(tables, box, u, i, K);
      const SchemeValue f = eval_scheme(tables, u, i);
      CHECK(up.value == f.value);
      CHECK(up.branch == Branch::isaacs);
      CHECK(up.alpha == f.alpha);
      CHECK(lo.value == f.value);
      CHECK(lo.branch == Branch::isaacs);
      CHECK(lo.beta == f.beta);
    }
  }

  SUBCASE("zero data stays on the sup-inf branch with value zero") {
    auto q = singleton_problem(disk, Eigen::Matrix2d::Identity(), {0, 0}, 0.3, 0.0);
    const SchemeTables zt = build_scheme_tables(q, grid);
    const GridFunction zero(grid);
    const TruncatedValue up = eval_truncated_upper(zt, box, zero, 0, 1.0);
    CHECK(up.value == 0.0);
    CHECK(up.branch == Branch::isaacs);
    const TruncatedValue lo = eval_truncated_lower(zt, box, zero, 0, 1.0);
    CHECK(lo.value == 0.0);
    CHECK(lo.branch == Branch::isaacs);
  }

  SUBCASE("matches the two-call composition and keeps the envelope order") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
      const GridFunction u = random_function(grid, rng, 2.0);
      const std::size_t i = static_cast<std::size_t>(
          uniform01(rng) * static_cast<double>(grid.n_interior));
      for (double K : {1.0, 2.0, 8.0}) {
        const double f = eval_scheme(tables, u, i).value;
        const double up_ref = std::max(f, eval_discrete_pucci(box, u, i) - K);
        const double lo_ref = std::min(f, eval_discrete_pucci_lower(box, u, i) + K);
        const TruncatedValue up = eval_truncated_upper(tables, box, u, i, K);
        const TruncatedValue lo = eval_truncated_lower(tables, box, u, i, K);
        CHECK(up.value == up_ref);
        CHECK(lo.value == lo_ref);
        CHECK(up.value >= f);
        CHECK(lo.value <= f);
        CHECK((up.branch == Branch::pucci) ==
              (eval_discrete_pucci(box, u, i) - K > f));
      }
      // Monotone in K: upper nonincreasing, lower nondecreasing.
      double prev_up = 1e300, prev_lo = -1e300;
      for (double K : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double up = eval_truncated_upper(tables, box, u, i, K).value;
        const double lo = eval_truncated_lower(tables, box, u, i, K).value;
        CHECK(up <= prev_up + 1e-15);
        CHECK(lo >= prev_lo - 1e-15);
        prev_up = up;
        prev_lo = lo;
      }
    }
  }
}

TEST_CASE("consistency with the continuous operator is first order") {
  IsaacsProblem p;
  p.domain = make_disk(pt(0, 0), 1.5);
  p.controls_a.labels = {"a0", "a1"};
  p.controls_b.labels = {"b0", "b1"};
  p.coeffs = make_smooth_periodic_field(2, 2, 0.45, 0.5);
  p.g = constant_fn(0.0);
  p.bounds = {0.2, 20.0};

  SmoothFunction u;
  const Eigen::Vector2d w(1.1, 0.6);
  u.value = [w](const Point& x) {
    const double s = w[0] * x[0] + w[1] * x[1];
    return std::sin(s) + 0.25 * x[0] * x[0] - 0.125 * x[0] * x[1];
  };
  u.gradient = [w](const Point& x) -> Eigen::VectorXd {
    const double s = w[0] * x[0] + w[1] * x[1];
    return Eigen::Vector2d(w[0] * std::cos(s) + 0.5 * x[0] - 0.125 * x[1],
                           w[1] * std::cos(s) - 0.125 * x[0]);
  };
  u.hessian = [w](const Point& x) -> Eigen::MatrixXd {
    const double s = w[0] * x[0] + w[1] * x[1];
    Eigen::Matrix2d H = -std::sin(s) * (w * w.transpose());
    H(0, 0) += 0.5;
    H(0, 1) -= 0.125;
    H(1, 0) -= 0.125;
    return H;
  };
  REQUIRE(check_derivatives(u, {pt(0.3, -0.2), pt(-0.6, 0.5)}) < 1e-5);

  std::vector<double> log_h, log_err;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const Grid grid = build_grid(p.domain, default_stencil(2), h);
    const SchemeTables tables = build_scheme_tables(p, grid);
    const GridFunction uh = sample(grid, u.value);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.n_interior; ++i) {
      const double discrete = eval_scheme(tables, uh, i).value;
      const double continuous = eval_isaacs(p, u, grid.points[i]).value;
      err = std::max(err, std::abs(discrete - continuous));
    }
    REQUIRE(err > 1e-14);
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(err));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    mx += log_h[i];
    my += log_err[i];
  }
  mx /= static_cast<double>(log_h.size());
  my /= static_cast<double>(log_h.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    num += (log_h[i] - mx) * (log_err[i] - my);
    den += (log_h[i] - mx) * (log_h[i] - mx);
  }
  const double slope = num / den;
  CHECK(slope >= 0.9);
  CHECK(slope <= 2.5);
}
