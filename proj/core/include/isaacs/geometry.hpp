#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace isaacs {

using Point = Eigen::VectorXd;

/// Bounded open domain described by its exact signed distance function:
/// positive inside (where it equals dist(x, complement)), negative outside.
/// `inside` is defined as signed_distance > 0, so the two can never disagree.
struct Domain {
  std::string name;
  std::function<double(const Point&)> signed_distance;
  Point box_lo;      // axis-aligned bounding box of the closure
  Point box_hi;
  double diameter = 0.0;

  bool inside(const Point& x) const { return signed_distance(x) > 0.0; }
  int dim() const { return static_cast<int>(box_lo.size()); }
};

Domain make_disk(const Point& center, double radius);
Domain make_ellipse(const Point& center, double semi_x, double semi_y);
/// Axis-aligned open box (corners are only C^0; kept for tests and studies
/// that do not need boundary smoothness).
Domain make_box(const Point& lo, const Point& hi);
/// Box with quarter-circle corner fillets of the given radius; the boundary
/// is C^{1,1} (curvature jumps where arcs meet edges) and the signed
/// distance is exact and closed-form.
Domain make_rounded_box(const Point& lo, const Point& hi, double corner_radius);

/// Exact Euclidean distance from `p` to the ellipse x^2/a^2 + y^2/b^2 = 1
/// centred at the origin (robust bisection; works for inside and outside
/// query points). Exposed for direct testing.
double point_to_ellipse_distance(double a, double b, const Eigen::Vector2d& p);

}  // namespace isaacs
