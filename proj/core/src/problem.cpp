#include "isaacs/problem.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "isaacs/errors.hpp"

namespace isaacs {

namespace {

double uniform01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

void check_controls(const IsaacsProblem& p, std::size_t alpha, std::size_t beta) {
  if (alpha >= p.controls_a.size())
    throw UnknownControl("alpha index " + std::to_string(alpha) + " out of range");
  if (beta >= p.controls_b.size())
    throw UnknownControl("beta index " + std::to_string(beta) + " out of range");
}

}  // namespace

double hoelder_gamma(double chi) { return (4.0 - 3.0 * chi) / (8.0 - 4.0 * chi); }

double eval_generator(const IsaacsProblem& problem, std::size_t alpha,
                      std::size_t beta, const SmoothFunction& phi, const Point& x) {
  check_controls(problem, alpha, beta);
  const Eigen::MatrixXd a = problem.coeffs.a(alpha, beta, x);
  const Eigen::VectorXd b = problem.coeffs.b(alpha, beta, x);
  const double c = problem.coeffs.c(alpha, beta, x);
  const Eigen::MatrixXd hess = phi.hessian(x);
  const Eigen::VectorXd grad = phi.gradient(x);
  return (a.array() * hess.array()).sum() + b.dot(grad) - c * phi.value(x);
}

IsaacsValue eval_isaacs(const IsaacsProblem& problem, const SmoothFunction& phi,
                        const Point& x) {
  if (problem.controls_a.size() == 0 || problem.controls_b.size() == 0)
    throw UnknownControl("empty control set");
  IsaacsValue best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t alpha = 0; alpha < problem.controls_a.size(); ++alpha) {
    double row = std::numeric_limits<double>::infinity();
    std::size_t row_beta = 0;
    for (std::size_t beta = 0; beta < problem.controls_b.size(); ++beta) {
      const double v = eval_generator(problem, alpha, beta, phi, x) +
                       problem.coeffs.f(alpha, beta, x);
      if (v < row) {
        row = v;
        row_beta = beta;
      }
    }
    if (row > best.value) {
      best.value = row;
      best.alpha = alpha;
      best.beta = row_beta;
    }
  }
  return best;
}

std::vector<Point> sample_in_domain(const Domain& domain, int count,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int d = domain.dim();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    Point x(d);
    for (int i = 0; i < d; ++i)
      x[i] = domain.box_lo[i] + (domain.box_hi[i] - domain.box_lo[i]) * uniform01(rng);
    if (domain.inside(x)) out.push_back(x);
    if (++guard > 10000 * count)
      throw std::runtime_error("domain rejection sampling failed to make progress");
  }
  return out;
}

double check_derivatives(const SmoothFunction& fn, const std::vector<Point>& probes,
                         double step) {
  double worst = 0.0;
  for (const Point& x : probes) {
    const int d = static_cast<int>(x.size());
    const Eigen::VectorXd grad = fn.gradient(x);
    const Eigen::MatrixXd hess = fn.hessian(x);
    for (int i = 0; i < d; ++i) {
      Point xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double gi = (fn.value(xp) - fn.value(xm)) / (2.0 * step);
      worst = std::max(worst, std::abs(gi - grad[i]));
      const double hii =
          (fn.value(xp) - 2.0 * fn.value(x) + fn.value(xm)) / (step * step);
      worst = std::max(worst, std::abs(hii - hess(i, i)));
      for (int j = i + 1; j < d; ++j) {
        Point xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += step;
        xpp[j] += step;
        xpm[i] += step;
        xpm[j] -= step;
        xmp[i] -= step;
        xmp[j] += step;
        xmm[i] -= step;
        xmm[j] -= step;
        const double hij = (fn.value(xpp) - fn.value(xpm) - fn.value(xmp) +
                            fn.value(xmm)) /
                           (4.0 * step * step);
        worst = std::max(worst, std::abs(hij - hess(i, j)));
      }
    }
  }
  return worst;
}

ValidationReport validate_problem(const IsaacsProblem& problem, int samples,
                                  std::uint64_t seed) {
  ValidationReport rep;
  rep.min_ellipticity_margin = std::numeric_limits<double>::infinity();
  auto fail = [&](const std::string& what) {
    if (rep.ok) {
      rep.ok = false;
      rep.first_failure = what;
    }
  };

  const double delta = problem.bounds.delta;
  const double k0 = problem.bounds.k0;
  if (!(delta > 0.0 && delta < 1.0)) fail("delta outside (0, 1)");
  if (!(k0 >= 0.0)) fail("k0 negative");
  if (problem.controls_a.size() == 0 || problem.controls_b.size() == 0)
    fail("empty control set");
  if (!(problem.coeffs.gamma > 0.0 && problem.coeffs.gamma < 0.5))
    fail("gamma outside (0, 1/2)");
  if (!(problem.coeffs.tau > 0.0 && problem.coeffs.tau < 1.0))
    fail("tau outside (0, 1)");
  if (!rep.ok) return rep;

  const std::vector<Point> points = sample_in_domain(problem.domain, samples, seed);
  const int d = problem.domain.dim();

  // Fixed direction probes for the ellipticity check (2-D: 16 angles; in
  // general the basis plus normalized basis sums).
  std::vector<Eigen::VectorXd> dirs;
  if (d == 2) {
    for (int j = 0; j < 16; ++j) {
      const double th = M_PI * j / 16.0;
      Eigen::VectorXd e(2);
      e << std::cos(th), std::sin(th);
      dirs.push_back(e);
    }
  } else {
    for (int i = 0; i < d; ++i) dirs.push_back(Eigen::VectorXd::Unit(d, i));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e[i] = e[j] = 1.0 / std::sqrt(2.0);
        dirs.push_back(e);
      }
  }

  for (std::size_t ia = 0; ia < problem.controls_a.size(); ++ia) {
    for (std::size_t ib = 0; ib < problem.controls_b.size(); ++ib) {
      for (const Point& x : points) {
        const Eigen::MatrixXd a = problem.coeffs.a(ia, ib, x);
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
          fail("coefficient matrix not symmetric");
        for (const auto& e : dirs) {
          const double q = e.dot(a * e);
          const double margin = std::min(q - delta, 1.0 / delta - q);
          rep.min_ellipticity_margin = std::min(rep.min_ellipticity_margin, margin);
          if (margin < -1e-12) fail("coefficient matrix escapes the S_delta band");
        }
        const double bn = problem.coeffs.b(ia, ib, x).norm();
        const double cv = problem.coeffs.c(ia, ib, x);
        const double fv = std::abs(problem.coeffs.f(ia, ib, x));
        rep.max_drift = std::max(rep.max_drift, bn);
        rep.max_zeroth = std::max(rep.max_zeroth, cv);
        rep.max_source = std::max(rep.max_source, fv);
        if (cv < 0.0) fail("c negative");
        if (bn > k0 + 1e-12 || cv > k0 + 1e-12 || fv > k0 + 1e-12)
          fail("drift / zeroth-order / source bound exceeds k0");
      }
      // Hoelder quotients of a over consecutive sample pairs.
      for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
        const Point& x = points[i];
        const Point& y = points[i + 1];
        const double dist = (x - y).norm();
        if (dist < 1e-12) continue;
        const double diff = (problem.coeffs.a(ia, ib, x) - problem.coeffs.a(ia, ib, y))
                                .norm();
        const double quot = diff / std::pow(dist, problem.coeffs.gamma);
        rep.max_a_hoelder = std::max(rep.max_a_hoelder, quot);
        if (quot > k0 + 1e-9) fail("Hoelder quotient of a exceeds k0");
      }
    }
  }

  // C^{1,1} bound on the boundary data: |g|, |Dg|, and the difference
  // quotient of Dg between sample pairs.
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& x = points[i];
    rep.max_g_c11 = std::max(rep.max_g_c11, std::abs(problem.g.value(x)));
    rep.max_g_c11 = std::max(rep.max_g_c11, problem.g.gradient(x).norm());
    if (i + 1 < points.size()) {
      const Point& y = points[i + 1];
      const double dist = (x - y).norm();
      if (dist > 1e-12)
        rep.max_g_c11 = std::max(
            rep.max_g_c11,
            (problem.g.gradient(x) - problem.g.gradient(y)).norm() / dist);
    }
  }
  if (rep.max_g_c11 > k0 + 1e-9) fail("boundary data exceeds the C^{1,1} bound k0");

  return rep;
}

}  // namespace isaacs
