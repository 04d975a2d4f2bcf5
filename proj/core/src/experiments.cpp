#include "isaacs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "isaacs/coefficients.hpp"
#include "isaacs/discrete.hpp"
#include "isaacs/errors.hpp"

namespace isaacs {

namespace {

double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

Point pt2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

PowerFit fit_loglog(const std::vector<double>& abscissae,
                    const std::vector<double>& errors, double drop_below) {
  if (abscissae.size() != errors.size())
    throw std::invalid_argument("fit_loglog: mismatched sequence lengths");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] < drop_below) continue;
    if (!(abscissae[i] > 0.0) || !(errors[i] > 0.0))
      throw std::invalid_argument("fit_loglog: nonpositive datum");
    xs.push_back(std::log(abscissae[i]));
    ys.push_back(std::log(errors[i]));
  }
  const std::size_t n = xs.size();
  if (n < 2)
    throw std::invalid_argument(
        "fit_loglog: fewer than two points above the noise cutoff");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_loglog: abscissae are all equal");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.points_used = n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

// ---------------------------------------------------------------------------
// Manufactured cases
// ---------------------------------------------------------------------------

std::string to_string(CaseFamily family) {
  return family == CaseFamily::bellman_single ? "bellman-single"
                                              : "isaacs-saddle";
}

namespace {

/// Rebuilds the coefficient field of `skeleton` with f replaced by
/// f^{ab}(x) = -L^{ab}[exact](x) + shift[a][b].
IsaacsProblem with_manufactured_source(
    const IsaacsProblem& skeleton, const SmoothFunction& exact,
    const std::vector<std::vector<double>>& shift) {
  IsaacsProblem built = skeleton;
  IsaacsProblem snapshot = skeleton;  // the lambda must not see itself
  built.coeffs.f = [snapshot, exact, shift](std::size_t alpha, std::size_t beta,
                                            const Point& x) {
    return -eval_generator(snapshot, alpha, beta, exact, x) +
           shift[alpha][beta];
  };
  built.g = exact;
  return built;
}

}  // namespace

ManufacturedCase make_bellman_case(const SmoothFunction& exact,
                                   const IsaacsProblem& skeleton) {
  if (skeleton.controls_a.size() != 1 || skeleton.controls_b.size() != 1)
    throw std::invalid_argument(
        "make_bellman_case requires singleton control sets");
  ManufacturedCase c;
  c.exact = exact;
  c.problem = with_manufactured_source(skeleton, exact, {{0.0}});
  c.family = CaseFamily::bellman_single;
  return c;
}

ManufacturedCase make_isaacs_saddle_case(
    const SmoothFunction& exact, const IsaacsProblem& skeleton,
    const std::vector<std::vector<double>>& saddle) {
  const std::size_t na = skeleton.controls_a.size();
  const std::size_t nb = skeleton.controls_b.size();
  if (saddle.size() != na)
    throw std::invalid_argument("saddle table has wrong row count");
  for (const auto& row : saddle)
    if (row.size() != nb)
      throw std::invalid_argument("saddle table has wrong column count");
  double upper = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < na; ++a) {
    double inner = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nb; ++b) inner = std::min(inner, saddle[a][b]);
    upper = std::max(upper, inner);
  }
  if (std::abs(upper) > 1e-12) {
    std::ostringstream msg;
    msg << "saddle table has upper value " << upper << ", expected 0";
    throw SaddleValueNonzero(msg.str());
  }
  ManufacturedCase c;
  c.exact = exact;
  c.problem = with_manufactured_source(skeleton, exact, saddle);
  c.family = CaseFamily::isaacs_saddle;
  return c;
}

double construction_check(const ManufacturedCase& c, int probes,
                          std::uint64_t seed) {
  const std::vector<Point> xs = sample_in_domain(c.problem.domain, probes, seed);
  double worst = 0.0;
  for (const Point& x : xs)
    worst = std::max(worst, std::abs(eval_isaacs(c.problem, c.exact, x).value));
  return worst;
}

ManufacturedCase make_default_bellman_benchmark() {
  const double pi = std::acos(-1.0);
  SmoothFunction exact;
  exact.value = [pi](const Point& x) {
    return std::sin(pi * x[0]) * std::sin(pi * x[1]);
  };
  exact.gradient = [pi](const Point& x) {
    return pt2(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]),
               pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
  };
  exact.hessian = [pi](const Point& x) {
    Eigen::Matrix2d h;
    const double s1 = std::sin(pi * x[0]), c1 = std::cos(pi * x[0]);
    const double s2 = std::sin(pi * x[1]), c2 = std::cos(pi * x[1]);
    h << -pi * pi * s1 * s2, pi * pi * c1 * c2, pi * pi * c1 * c2,
        -pi * pi * s1 * s2;
    return Eigen::MatrixXd(h);
  };

  IsaacsProblem skeleton;
  skeleton.domain = make_disk(pt2(0.0, 0.0), 1.0);
  skeleton.controls_a.labels = {"only"};
  skeleton.controls_b.labels = {"only"};
  skeleton.coeffs = make_constant_field({{Eigen::Matrix2d::Identity()}},
                                        {{Eigen::Vector2d::Zero()}}, {{0.0}},
                                        {{0.0}}, hoelder_gamma(0.1), 0.5);
  skeleton.g = exact;
  skeleton.bounds = {0.2, 20.0};
  return make_bellman_case(exact, skeleton);
}

ManufacturedCase make_default_saddle_benchmark() {
  SmoothFunction exact;
  exact.value = [](const Point& x) { return 0.3 * std::exp(x[0] + x[1]); };
  exact.gradient = [](const Point& x) {
    const double e = 0.3 * std::exp(x[0] + x[1]);
    return pt2(e, e);
  };
  exact.hessian = [](const Point& x) {
    const double e = 0.3 * std::exp(x[0] + x[1]);
    Eigen::Matrix2d h;
    h << e, e, e, e;
    return Eigen::MatrixXd(h);
  };

  const double sig[2] = {-1.0, +1.0};
  std::vector<std::vector<Eigen::Matrix2d>> a(2,
                                              std::vector<Eigen::Matrix2d>(2));
  std::vector<std::vector<Eigen::Vector2d>> b(2,
                                              std::vector<Eigen::Vector2d>(2));
  std::vector<std::vector<double>> c(2, std::vector<double>(2));
  std::vector<std::vector<double>> zero(2, std::vector<double>(2, 0.0));
  std::vector<std::vector<double>> saddle(2, std::vector<double>(2));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2d m;
      const double stretch = 0.15 * sig[i] + 0.1 * sig[j];
      const double twist = 0.05 * sig[i] * sig[j];
      m << 1.0 + stretch, twist, twist, 1.0 - stretch;
      a[i][j] = m;
      b[i][j] = Eigen::Vector2d(0.4 * sig[i], -0.3 * sig[j]);
      c[i][j] = 0.15 + 0.05 * sig[i] * sig[j];
      saddle[i][j] = sig[i] - sig[j];
    }
  }

  IsaacsProblem skeleton;
  skeleton.domain = make_disk(pt2(0.0, 0.0), 1.0);
  skeleton.controls_a.labels = {"a-", "a+"};
  skeleton.controls_b.labels = {"b-", "b+"};
  skeleton.coeffs = make_constant_field(a, b, c, zero, hoelder_gamma(0.1), 0.5);
  skeleton.g = exact;
  skeleton.bounds = {0.2, 20.0};
  return make_isaacs_saddle_case(exact, skeleton, saddle);
}

IsaacsProblem make_rough_benchmark() {
  IsaacsProblem p;
  p.domain = make_disk(pt2(0.0, 0.0), 1.0);
  p.controls_a.labels = {"a0", "a1"};
  p.controls_b.labels = {"b0", "b1"};
  p.coeffs = make_rough_field(2, 2, hoelder_gamma(0.1), 0.5, p.domain);
  SmoothFunction zero;
  zero.value = [](const Point&) { return 0.0; };
  zero.gradient = [](const Point& x) {
    return Eigen::VectorXd::Zero(x.size()).eval();
  };
  zero.hessian = [](const Point& x) {
    return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
  };
  p.g = zero;
  p.bounds = {0.2, 20.0};
  return p;
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

RateReport run_grid_rate(const ManufacturedCase& c, const std::vector<double>& hs,
                         const Stencil& stencil, const SolveConfig& config) {
  if (hs.size() < 2) throw ConfigError("grid-rate study needs at least two h");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw ConfigError("grid-rate h values must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1]))
      throw ConfigError("grid-rate h values must be strictly decreasing");
  }
  const double check = construction_check(c);
  if (check > 1e-12) {
    std::ostringstream msg;
    msg << "manufactured case fails its construction check: max |F[exact]| = "
        << check;
    throw ConfigError(msg.str());
  }

  RateReport report;
  report.abscissae = hs;
  for (double h : hs) {
    const Grid grid = build_grid(c.problem.domain, stencil, h);
    auto [w, rep] = solve_isaacs(c.problem, grid, config);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      err = std::max(err, std::abs(w[i] - c.exact.value(grid.points[i])));
    report.errors.push_back(err);
  }

  const double cutoff = 100.0 * config.residual_tol;
  const auto above = static_cast<std::size_t>(std::count_if(
      report.errors.begin(), report.errors.end(),
      [cutoff](double e) { return e >= cutoff; }));
  if (above < 2) {
    report.points_used = above;
    report.caveat = "too few errors above the noise cutoff to fit an exponent";
    return report;
  }
  const PowerFit fit = fit_loglog(hs, report.errors, cutoff);
  report.fitted_exponent = fit.slope;
  report.fit_residual = fit.residual;
  report.points_used = fit.points_used;
  return report;
}

RateReport run_sandwich(const IsaacsProblem& problem, const Grid& grid,
                        const std::vector<double>& levels,
                        const SolveConfig& config, const PucciParams* params) {
  if (levels.empty()) throw ConfigError("truncation study needs levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 1.0))
      throw ConfigError("truncation levels must be at least 1");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw ConfigError("truncation levels must be strictly increasing");
  }

  const SchemeTables tables = build_scheme_tables(problem, grid);
  const PucciParams pp = params ? *params : default_pucci_params(problem.bounds);
  const PucciBox box = certify_pucci_box(pp, grid.stencil);
  const GridFunction initial = sample(grid, problem.g.value);
  auto [w, wrep] = solve_scheme(tables, initial, config);

  RateReport report;
  report.abscissae = levels;
  const double slack = 10.0 * config.residual_tol;
  for (double K : levels) {
    auto [u, urep] =
        solve_truncated(tables, box, TruncationSide::upper, K, initial, config);
    auto [v, vrep] =
        solve_truncated(tables, box, TruncationSide::lower, K, initial, config);
    double gap = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (v[i] > w[i] + slack || w[i] > u[i] + slack) {
        std::ostringstream msg;
        msg << "ordering violated at grid point (" << grid.points[i][0] << ", "
            << grid.points[i][1] << ") for K = " << K << ": v = " << v[i]
            << ", w = " << w[i] << ", u = " << u[i];
        throw OrderingViolation(msg.str());
      }
      gap = std::max(gap, std::abs(u[i] - v[i]));
      ref = std::max(ref, std::abs(u[i] - w[i]));
    }
    report.errors.push_back(gap);
    report.reference_gaps.push_back(ref);
  }

  report.caveat =
      "reference w is the untruncated solve on the same grid; the gap "
      "excludes discretization error but not limit-identification bias";
  const double cutoff = 100.0 * config.residual_tol;
  const auto above = static_cast<std::size_t>(std::count_if(
      report.errors.begin(), report.errors.end(),
      [cutoff](double e) { return e >= cutoff; }));
  if (above < 2) {
    report.points_used = above;
    report.caveat += "; too few gaps above the noise cutoff to fit an exponent";
    return report;
  }
  const PowerFit fit = fit_loglog(levels, report.errors, cutoff);
  report.fitted_exponent = -fit.slope;  // decay order: gap ~ C K^-exponent
  report.fit_residual = fit.residual;
  report.points_used = fit.points_used;
  return report;
}

double fit_boundary_constant(const IsaacsProblem& problem, const Grid& grid,
                             double K, const SolveConfig& config,
                             const PucciParams* params) {
  const TruncatedPair pair =
      solve_truncated_pair(problem, grid, K, config, params);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n_interior; ++i) {
    const double gval = problem.g.value(grid.points[i]);
    const double dev =
        std::abs(pair.u[i] - gval) + std::abs(pair.v[i] - gval);
    worst = std::max(worst, dev / grid.rho[i]);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Barrier certificate
// ---------------------------------------------------------------------------

double Barrier::value(const Point& x) const {
  return std::cosh(mu * R) - std::cosh(mu * x.norm());
}

Eigen::VectorXd Barrier::gradient(const Point& x) const {
  const double r = x.norm();
  if (r < 1e-12) return Eigen::VectorXd::Zero(x.size());
  return (-mu * std::sinh(mu * r) / r) * x;
}

Eigen::MatrixXd Barrier::hessian(const Point& x) const {
  const auto d = x.size();
  const double r = x.norm();
  if (r < 1e-12)
    return -mu * mu * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd radial = (x * x.transpose()) / (r * r);
  const Eigen::MatrixXd tangential =
      Eigen::MatrixXd::Identity(d, d) / r - (x * x.transpose()) / (r * r * r);
  return -mu * mu * std::cosh(mu * r) * radial -
         mu * std::sinh(mu * r) * tangential;
}

namespace {

/// Largest possible a:D2(psi) + b.D(psi) over the whole coefficient class at
/// radius r: the Hessian eigenvalues are known analytically (radial and
/// tangential), the extremal a weights them by delta / 1/delta, and the
/// worst drift aligns with the gradient.
double radial_slack_envelope(const Barrier& b, double delta, double k1,
                             double r) {
  const double lam_rad = -b.mu * b.mu * std::cosh(b.mu * r);
  const double lam_tan =
      r < 1e-12 ? -b.mu * b.mu : -b.mu * std::sinh(b.mu * r) / r;
  auto weigh = [delta](double lam) {
    return lam > 0.0 ? lam / delta : delta * lam;
  };
  const double slack =
      weigh(lam_rad) + weigh(lam_tan) + k1 * b.mu * std::sinh(b.mu * r);
  // cosh/sinh overflow at large mu * r; a certificate built on non-finite
  // arithmetic proves nothing, so it must count as a violation, never slip
  // past the max below (NaN loses every std::max comparison).
  return std::isfinite(slack) ? slack
                              : std::numeric_limits<double>::infinity();
}

double domain_radius_bound(const Domain& domain) {
  double worst = 0.0;
  const auto d = domain.box_lo.size();
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point corner(d);
    for (Eigen::Index i = 0; i < d; ++i)
      corner[i] = (mask >> i) & 1 ? domain.box_hi[i] : domain.box_lo[i];
    worst = std::max(worst, corner.norm());
  }
  return worst;
}

struct BarrierProbe {
  double sampled = -std::numeric_limits<double>::infinity();
  double envelope = -std::numeric_limits<double>::infinity();
  double min_value = std::numeric_limits<double>::infinity();
};

BarrierProbe probe_barrier(const Barrier& barrier, const Domain& domain,
                           double delta, double k1, int samples,
                           std::uint64_t seed) {
  if (!(delta > 0.0) || delta >= 1.0)
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(k1 >= 0.0)) throw std::invalid_argument("k1 must be nonnegative");
  const double pi = std::acos(-1.0);
  const std::vector<Point> xs = sample_in_domain(domain, samples, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  BarrierProbe probe;
  for (const Point& x : xs) {
    const double theta = pi * uniform01(rng);
    const double phi = 2.0 * pi * uniform01(rng);
    // Eigenvalues drawn independently from the band edges: the isotropic
    // corners delta I and (1/delta) I are extreme too, and delta I is the
    // worst diffusion for a concave radial profile.
    const double lam0 = (rng() & 1) ? 1.0 / delta : delta;
    const double lam1 = (rng() & 1) ? 1.0 / delta : delta;
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d a =
        rot * Eigen::Vector2d(lam0, lam1).asDiagonal() * rot.transpose();
    const Eigen::Vector2d b(k1 * std::cos(phi), k1 * std::sin(phi));
    const Eigen::MatrixXd hess = barrier.hessian(x);
    const Eigen::VectorXd grad = barrier.gradient(x);
    const double slack =
        (a.array() * hess.array()).sum() + b.dot(grad.head<2>());
    probe.sampled =
        std::max(probe.sampled,
                 std::isfinite(slack)
                     ? slack
                     : std::numeric_limits<double>::infinity());
    probe.envelope = std::max(
        probe.envelope, radial_slack_envelope(barrier, delta, k1, x.norm()));
    const double value = barrier.value(x);
    probe.min_value =
        std::min(probe.min_value,
                 std::isfinite(value)
                     ? value
                     : -std::numeric_limits<double>::infinity());
  }
  return probe;
}

constexpr double kBarrierSlackBound = -1.0 + 1e-9;

}  // namespace

Barrier tune_barrier(const Domain& domain, double delta, double k1) {
  Barrier barrier;
  barrier.R = 2.0 * (1.0 + domain_radius_bound(domain));
  for (double mu = 1.0; mu <= 16'777'216.0; mu *= 2.0) {
    barrier.mu = mu;
    const BarrierProbe probe = probe_barrier(barrier, domain, delta, k1, 4096, 2);
    // Also sweep the analytic envelope densely up to the bounding radius so
    // acceptance cannot hinge on sampling luck.
    double dense = probe.envelope;
    const double rmax = domain_radius_bound(domain);
    for (int i = 0; i <= 2048; ++i)
      dense = std::max(dense, radial_slack_envelope(
                                  barrier, delta, k1,
                                  rmax * static_cast<double>(i) / 2048.0));
    if (dense <= kBarrierSlackBound && probe.min_value >= 1.0) return barrier;
  }
  throw BarrierInvalid("no power-of-two mu up to 2^24 certifies the barrier");
}

double verify_barrier(const Barrier& barrier, const Domain& domain, double delta,
                      double k1, int samples, std::uint64_t seed) {
  const BarrierProbe probe =
      probe_barrier(barrier, domain, delta, k1, samples, seed);
  if (probe.min_value < 1.0) {
    std::ostringstream msg;
    msg << "barrier dips to " << probe.min_value << " inside the domain";
    throw BarrierInvalid(msg.str());
  }
  if (probe.sampled > kBarrierSlackBound) {
    std::ostringstream msg;
    msg << "barrier slack " << probe.sampled << " exceeds " << kBarrierSlackBound;
    throw BarrierInvalid(msg.str());
  }
  return probe.sampled;
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

Point FineLattice::point(std::size_t ix, std::size_t iy) const {
  Point p(2);
  p << lo[0] + spacing * static_cast<double>(ix),
      lo[1] + spacing * static_cast<double>(iy);
  return p;
}

FineLattice sample_box(const std::function<double(const Point&)>& fn,
                       const Point& lo, const Point& hi, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  FineLattice lat;
  lat.lo = lo;
  lat.spacing = spacing;
  lat.nx = static_cast<std::size_t>(
               std::floor((hi[0] - lo[0]) / spacing + 1e-9)) +
           1;
  lat.ny = static_cast<std::size_t>(
               std::floor((hi[1] - lo[1]) / spacing + 1e-9)) +
           1;
  lat.values.resize(lat.nx * lat.ny);
  for (std::size_t iy = 0; iy < lat.ny; ++iy)
    for (std::size_t ix = 0; ix < lat.nx; ++ix)
      lat.values[iy * lat.nx + ix] = fn(lat.point(ix, iy));
  return lat;
}

double mollify_at(const FineLattice& u, double eps, const Point& x) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double h = u.spacing;
  const double x_hi = u.lo[0] + h * static_cast<double>(u.nx - 1);
  const double y_hi = u.lo[1] + h * static_cast<double>(u.ny - 1);
  if (x[0] - eps < u.lo[0] - 1e-12 || x[0] + eps > x_hi + 1e-12 ||
      x[1] - eps < u.lo[1] - 1e-12 || x[1] + eps > y_hi + 1e-12) {
    std::ostringstream msg;
    msg << "mollification ball of radius " << eps << " around (" << x[0] << ", "
        << x[1] << ") leaves the sampled box";
    throw SupportEscapesRegion(msg.str());
  }
  const auto lo_index = [&](double coord, double origin) {
    return static_cast<std::int64_t>(std::ceil((coord - origin) / h - 1e-12));
  };
  const auto hi_index = [&](double coord, double origin) {
    return static_cast<std::int64_t>(std::floor((coord - origin) / h + 1e-12));
  };
  const std::int64_t ix0 = std::max<std::int64_t>(0, lo_index(x[0] - eps, u.lo[0]));
  const std::int64_t ix1 = std::min<std::int64_t>(
      static_cast<std::int64_t>(u.nx) - 1, hi_index(x[0] + eps, u.lo[0]));
  const std::int64_t iy0 = std::max<std::int64_t>(0, lo_index(x[1] - eps, u.lo[1]));
  const std::int64_t iy1 = std::min<std::int64_t>(
      static_cast<std::int64_t>(u.ny) - 1, hi_index(x[1] + eps, u.lo[1]));
  double weight_sum = 0.0, value_sum = 0.0;
  for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
      const double dx = u.lo[0] + h * static_cast<double>(ix) - x[0];
      const double dy = u.lo[1] + h * static_cast<double>(iy) - x[1];
      const double t2 = (dx * dx + dy * dy) / (eps * eps);
      if (t2 >= 1.0) continue;
      const double w = std::exp(-1.0 / (1.0 - t2));
      weight_sum += w;
      value_sum += w * u.values[static_cast<std::size_t>(iy) * u.nx +
                                static_cast<std::size_t>(ix)];
    }
  }
  if (weight_sum <= 0.0)
    throw std::invalid_argument(
        "mollification radius below the lattice resolution");
  return value_sum / weight_sum;
}

std::vector<double> mollify(const FineLattice& u, double eps,
                            const std::vector<Point>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(mollify_at(u, eps, x));
  return out;
}

// ---------------------------------------------------------------------------
// Interior seminorm diagnostic
// ---------------------------------------------------------------------------

std::vector<SeminormRow> interior_seminorm_diagnostic(
    const GridFunction& w, const std::vector<double>& eps_seq, double chi) {
  if (!(chi > 0.0) || chi >= 1.0)
    throw std::invalid_argument("chi must lie in (0, 1)");
  const Grid& grid = *w.grid;
  const std::size_t sx = grid.stencil.basis_slot(0);
  const std::size_t sy = grid.stencil.basis_slot(1);
  std::vector<Eigen::Vector2d> grads(grid.n_interior);
  for (std::size_t i = 0; i < grid.n_interior; ++i) {
    const auto gx = (w[static_cast<std::size_t>(grid.neighbor(i, sx, +1))] -
                     w[static_cast<std::size_t>(grid.neighbor(i, sx, -1))]) /
                    (2.0 * grid.h);
    const auto gy = (w[static_cast<std::size_t>(grid.neighbor(i, sy, +1))] -
                     w[static_cast<std::size_t>(grid.neighbor(i, sy, -1))]) /
                    (2.0 * grid.h);
    grads[i] = Eigen::Vector2d(gx, gy);
  }

  std::vector<SeminormRow> rows;
  for (double eps : eps_seq) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < grid.n_interior; ++i)
      if (grid.rho[i] >= eps) keep.push_back(i);
    double sem = 0.0;
    for (std::size_t p = 0; p < keep.size(); ++p) {
      for (std::size_t q = p + 1; q < keep.size(); ++q) {
        const double dist =
            (grid.points[keep[p]] - grid.points[keep[q]]).norm();
        if (dist <= 0.0) continue;
        const double jump = (grads[keep[p]] - grads[keep[q]]).norm();
        sem = std::max(sem, jump / std::pow(dist, chi));
      }
    }
    rows.push_back({eps, sem, sem * std::pow(eps, 1.0 + chi)});
  }
  return rows;
}

}  // namespace isaacs
