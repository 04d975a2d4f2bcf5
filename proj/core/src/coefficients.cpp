#include "isaacs/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace isaacs {

namespace {

constexpr double kGoldenAngle = 2.399963229728653;

// Deterministic per-pair phase; distinct streams are separated by `salt`.
double pair_phase(std::size_t idx, int salt) {
  return kGoldenAngle * (static_cast<double>(idx + 1) + 0.37 * salt);
}

Eigen::Vector2d unit_at(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

// Symmetric rank-structured direction matrix with eigenvalues +1 (along u)
// and -1 (across u): modulating with it keeps trace(a) = 2 exactly.
Eigen::Matrix2d bipolar(const Eigen::Vector2d& u) {
  return 2.0 * u * u.transpose() - Eigen::Matrix2d::Identity();
}

}  // namespace

CoefficientField make_constant_field(std::vector<std::vector<Eigen::Matrix2d>> a,
                                     std::vector<std::vector<Eigen::Vector2d>> b,
                                     std::vector<std::vector<double>> c,
                                     std::vector<std::vector<double>> f,
                                     double gamma, double tau) {
  const std::size_t na = a.size();
  if (na == 0 || b.size() != na || c.size() != na || f.size() != na)
    throw std::invalid_argument("constant-field tables must share the alpha size");
  const std::size_t nb = a[0].size();
  for (std::size_t i = 0; i < na; ++i)
    if (a[i].size() != nb || b[i].size() != nb || c[i].size() != nb ||
        f[i].size() != nb)
      throw std::invalid_argument("constant-field tables must share the beta size");

  CoefficientField field;
  field.gamma = gamma;
  field.tau = tau;
  field.a = [a](std::size_t i, std::size_t j, const Point&) -> Eigen::MatrixXd {
    return a.at(i).at(j);
  };
  field.b = [b](std::size_t i, std::size_t j, const Point&) -> Eigen::VectorXd {
    return b.at(i).at(j);
  };
  field.c = [c](std::size_t i, std::size_t j, const Point&) { return c.at(i).at(j); };
  field.f = [f](std::size_t i, std::size_t j, const Point&) { return f.at(i).at(j); };
  return field;
}

CoefficientField make_smooth_periodic_field(std::size_t n_alpha, std::size_t n_beta,
                                            double gamma, double tau,
                                            const SmoothFamilyParams& p) {
  if (n_alpha == 0 || n_beta == 0)
    throw std::invalid_argument("control sets must be nonempty");
  if (!(p.anisotropy >= 0.0 && p.anisotropy < 1.0))
    throw std::invalid_argument("anisotropy must lie in [0, 1)");

  CoefficientField field;
  field.gamma = gamma;
  field.tau = tau;
  const double freq = M_PI * p.frequency;
  field.a = [=](std::size_t i, std::size_t j, const Point& x) -> Eigen::MatrixXd {
    const std::size_t idx = i * n_beta + j;
    const double phase = pair_phase(idx, 0);
    const Eigen::Vector2d u = unit_at(pair_phase(idx, 1));
    const double mod = p.anisotropy * std::sin(freq * x.dot(u) + phase);
    return Eigen::Matrix2d::Identity() + mod * bipolar(u);
  };
  field.b = [=](std::size_t i, std::size_t j, const Point& x) -> Eigen::VectorXd {
    const std::size_t idx = i * n_beta + j;
    const double phase = pair_phase(idx, 2);
    return p.drift / std::sqrt(2.0) *
           Eigen::Vector2d(std::sin(freq * x[0] + phase),
                           std::cos(freq * x[1] + phase));
  };
  field.c = [=](std::size_t i, std::size_t j, const Point& x) {
    const std::size_t idx = i * n_beta + j;
    return p.zeroth * 0.5 *
           (1.0 + std::sin(freq * (x[0] + x[1]) + pair_phase(idx, 3)));
  };
  field.f = [=](std::size_t i, std::size_t j, const Point& x) {
    const std::size_t idx = i * n_beta + j;
    return p.source * std::sin(freq * (x[0] - x[1]) + pair_phase(idx, 4));
  };
  return field;
}

CoefficientField make_rough_field(std::size_t n_alpha, std::size_t n_beta,
                                  double gamma, double tau, const Domain& domain,
                                  const RoughFamilyParams& p) {
  if (n_alpha == 0 || n_beta == 0)
    throw std::invalid_argument("control sets must be nonempty");
  if (domain.dim() != 2)
    throw std::invalid_argument("rough family is two-dimensional");
  if (!(gamma > 0.0 && gamma < 0.5) || !(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("exponents must satisfy gamma in (0,1/2), tau in (0,1)");

  const Eigen::Vector2d center(0.5 * (domain.box_lo[0] + domain.box_hi[0]),
                               0.5 * (domain.box_lo[1] + domain.box_hi[1]));
  const double ring =
      p.anchor_radius *
      0.5 * std::min(domain.box_hi[0] - domain.box_lo[0],
                     domain.box_hi[1] - domain.box_lo[1]);
  const double scale = std::max(domain.diameter, 1e-12);

  // Normalized fractional-power radial profile around an anchor: exactly
  // C^e at the anchor and bounded by ~(1.5)^e on the domain.
  auto profile = [scale](const Point& x, const Eigen::Vector2d& anchor, double e) {
    return std::pow((Eigen::Vector2d(x[0], x[1]) - anchor).norm() / scale, e);
  };
  auto anchor_of = [=](std::size_t idx, int salt) -> Eigen::Vector2d {
    return center + ring * unit_at(pair_phase(idx, salt));
  };

  CoefficientField field;
  field.gamma = gamma;
  field.tau = tau;
  field.a = [=](std::size_t i, std::size_t j, const Point& x) -> Eigen::MatrixXd {
    const std::size_t idx = i * n_beta + j;
    const Eigen::Vector2d u = unit_at(pair_phase(idx, 1));
    const double mod = p.anisotropy * profile(x, anchor_of(idx, 0), gamma);
    return Eigen::Matrix2d::Identity() + mod * bipolar(u);
  };
  field.b = [=](std::size_t i, std::size_t j, const Point& x) -> Eigen::VectorXd {
    const std::size_t idx = i * n_beta + j;
    return p.drift * profile(x, anchor_of(idx, 5), tau) *
           unit_at(pair_phase(idx, 6));
  };
  field.c = [=](std::size_t i, std::size_t j, const Point& x) {
    const std::size_t idx = i * n_beta + j;
    return p.zeroth * profile(x, anchor_of(idx, 7), tau);
  };
  field.f = [=](std::size_t i, std::size_t j, const Point& x) {
    const std::size_t idx = i * n_beta + j;
    const double sign_mix = std::cos(1.0 + 2.1 * static_cast<double>(idx));
    return p.source * sign_mix * (profile(x, anchor_of(idx, 8), tau) - 0.5);
  };
  return field;
}

}  // namespace isaacs
