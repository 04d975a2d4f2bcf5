#include "isaacs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isaacs {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Domain make_disk(const Point& center, double radius) {
  require(radius > 0.0, "disk radius must be positive");
  Domain d;
  d.name = "disk";
  Point c = center;
  d.signed_distance = [c, radius](const Point& x) {
    return radius - (x - c).norm();
  };
  d.box_lo = center.array() - radius;
  d.box_hi = center.array() + radius;
  d.diameter = 2.0 * radius;
  return d;
}

double point_to_ellipse_distance(double a, double b, const Eigen::Vector2d& p) {
  require(a > 0.0 && b > 0.0, "ellipse semi-axes must be positive");
  if (a < b) return point_to_ellipse_distance(b, a, {p.y(), p.x()});
  if (a == b) return std::abs(p.norm() - a);

  const double p0 = std::abs(p.x()), p1 = std::abs(p.y());
  if (p1 > 0.0) {
    if (p0 > 0.0) {
      // F(t) = (a p0/(t+a^2))^2 + (b p1/(t+b^2))^2 - 1 is strictly decreasing
      // on (-b^2, inf) with a unique root; bracket with F(lo) >= 0 >= F(hi).
      double lo = -b * b + b * p1;
      double hi = -b * b + std::hypot(a * p0, b * p1);
      auto F = [&](double t) {
        const double u = a * p0 / (t + a * a);
        const double v = b * p1 / (t + b * b);
        return u * u + v * v - 1.0;
      };
      for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) >= 0.0 ? lo : hi) = mid;
      }
      const double t = 0.5 * (lo + hi);
      const double cx = a * a * p0 / (t + a * a);
      const double cy = b * b * p1 / (t + b * b);
      return std::hypot(cx - p0, cy - p1);
    }
    return std::abs(p1 - b);
  }
  // On the major axis the closest point leaves the axis while p0 is inside
  // the evolute cusp (a^2 - b^2)/a.
  const double cusp = (a * a - b * b) / a;
  if (p0 < cusp) {
    const double cx = a * a * p0 / (a * a - b * b);
    const double cy = b * std::sqrt(std::max(0.0, 1.0 - (cx / a) * (cx / a)));
    return std::hypot(cx - p0, cy);
  }
  return std::abs(p0 - a);
}

Domain make_ellipse(const Point& center, double semi_x, double semi_y) {
  require(center.size() == 2, "ellipse domain is two-dimensional");
  require(semi_x > 0.0 && semi_y > 0.0, "ellipse semi-axes must be positive");
  Domain d;
  d.name = "ellipse";
  Point c = center;
  d.signed_distance = [c, semi_x, semi_y](const Point& x) {
    const Eigen::Vector2d rel(x[0] - c[0], x[1] - c[1]);
    const double level =
        (rel.x() / semi_x) * (rel.x() / semi_x) + (rel.y() / semi_y) * (rel.y() / semi_y);
    const double dist = point_to_ellipse_distance(semi_x, semi_y, rel);
    return level < 1.0 ? dist : -dist;
  };
  d.box_lo = Point(2);
  d.box_hi = Point(2);
  d.box_lo << c[0] - semi_x, c[1] - semi_y;
  d.box_hi << c[0] + semi_x, c[1] + semi_y;
  d.diameter = 2.0 * std::max(semi_x, semi_y);
  return d;
}

namespace {

// Signed distance to an axis box via the componentwise excess
// q_i = |x_i - c_i| - half_i; positive inside per the Domain convention.
double box_signed_distance(const Point& x, const Point& c, const Point& half) {
  const int n = static_cast<int>(x.size());
  double max_q = -std::numeric_limits<double>::infinity();
  double out_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double q = std::abs(x[i] - c[i]) - half[i];
    max_q = std::max(max_q, q);
    out_sq += std::max(q, 0.0) * std::max(q, 0.0);
  }
  return -(std::sqrt(out_sq) + std::min(max_q, 0.0));
}

}  // namespace

Domain make_box(const Point& lo, const Point& hi) {
  require(lo.size() == hi.size(), "box corners must have equal dimensions");
  require(((hi - lo).array() > 0.0).all(), "box must have positive extents");
  Domain d;
  d.name = "box";
  Point c = 0.5 * (lo + hi);
  Point half = 0.5 * (hi - lo);
  d.signed_distance = [c, half](const Point& x) {
    return box_signed_distance(x, c, half);
  };
  d.box_lo = lo;
  d.box_hi = hi;
  d.diameter = (hi - lo).norm();
  return d;
}

Domain make_rounded_box(const Point& lo, const Point& hi, double corner_radius) {
  require(lo.size() == hi.size(), "box corners must have equal dimensions");
  require(((hi - lo).array() > 0.0).all(), "box must have positive extents");
  Point half = 0.5 * (hi - lo);
  require(corner_radius > 0.0 && corner_radius < half.minCoeff(),
          "corner radius must lie in (0, min half-extent)");
  Domain d;
  d.name = "rounded_box";
  Point c = 0.5 * (lo + hi);
  // Minkowski sum of the shrunken box with a disk of the fillet radius:
  // exact distance = distance to the inner box plus the radius.
  Point inner_half = half.array() - corner_radius;
  d.signed_distance = [c, inner_half, corner_radius](const Point& x) {
    return box_signed_distance(x, c, inner_half) + corner_radius;
  };
  d.box_lo = lo;
  d.box_hi = hi;
  d.diameter = (hi - lo).norm();
  return d;
}

}  // namespace isaacs
