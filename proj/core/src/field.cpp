#include "dphase/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace dphase {

DomainSpec DomainSpec::rect(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("degenerate rectangle");
  DomainSpec d;
  d.shape = Shape::Rect;
  d.x0 = x0; d.y0 = y0; d.x1 = x1; d.y1 = y1;
  return d;
}

DomainSpec DomainSpec::disc(double cx, double cy, double radius) {
  if (!(radius > 0))
    throw std::invalid_argument("disc radius must be positive");
  DomainSpec d;
  d.shape = Shape::Disc;
  d.cx = cx; d.cy = cy; d.radius = radius;
  return d;
}

void DomainSpec::bounding_box(double& bx0, double& by0, double& bx1, double& by1) const {
  if (shape == Shape::Rect) {
    bx0 = x0; by0 = y0; bx1 = x1; by1 = y1;
  } else {
    bx0 = cx - radius; by0 = cy - radius; bx1 = cx + radius; by1 = cy + radius;
  }
}

bool DomainSpec::contains(double x, double y) const {
  if (shape == Shape::Rect)
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  double dx = x - cx, dy = y - cy;
  return dx * dx + dy * dy <= radius * radius * (1 + 1e-14);
}

double DomainSpec::inscribed_radius() const {
  if (shape == Shape::Rect) return 0.5 * std::min(x1 - x0, y1 - y0);
  return radius;
}

void DomainSpec::center(double& x, double& y) const {
  if (shape == Shape::Rect) {
    x = 0.5 * (x0 + x1);
    y = 0.5 * (y0 + y1);
  } else {
    x = cx;
    y = cy;
  }
}

ScalarField ScalarField::parse(std::string_view src, std::string label) {
  return ScalarField(Expr::parse(src), std::move(label));
}

ScalarField ScalarField::constant(double value, std::string label) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return ScalarField(Expr::parse(std::string_view(buf, res.ptr - buf)), std::move(label));
}

Extrema field_extrema(const ScalarField& f, const DomainSpec& domain, int n) {
  if (n < 2) throw std::invalid_argument("field_extrema: n must be >= 2 per axis");
  double bx0, by0, bx1, by1;
  domain.bounding_box(bx0, by0, bx1, by1);

  double low = std::numeric_limits<double>::infinity();
  double high = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < n; ++j) {
    double y = by0 + (by1 - by0) * j / (n - 1);
    for (int i = 0; i < n; ++i) {
      double x = bx0 + (bx1 - bx0) * i / (n - 1);
      if (!domain.contains(x, y)) continue;
      double v = f(x, y);
      low = std::min(low, v);
      high = std::max(high, v);
      any = true;
    }
  }
  if (!any)
    throw std::invalid_argument("field_extrema: no sample point falls in the domain");
  return Extrema{low, high};
}

bool exponent_field_ok(const ScalarField& f, const DomainSpec& domain, int n, double* margin) {
  Extrema e = field_extrema(f, domain, n);
  double m = e.low - 1.0;
  if (margin) *margin = m;
  return m > 1e-12;
}

}  // namespace dphase
