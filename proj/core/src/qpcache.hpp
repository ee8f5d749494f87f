// Internal: field values sampled once per (mesh, rule) at every quadrature
// point, so hot assembly loops never re-evaluate expression trees.
#pragma once

#include "dphase/field.hpp"
#include "dphase/mesh.hpp"

#include <cmath>
#include <vector>

namespace dphase::detail {

struct QpCache {
  int nqp = 0;
  std::vector<double> v;  // element-major: v[e*nqp + k]
  double minv = 0, maxv = 0;
  bool constant = false;

  double at(int e, int k) const { return v[static_cast<std::size_t>(e) * nqp + k]; }
};

inline QpCache sample_field(const Mesh& mesh, const QuadratureRule& rule,
                            const ScalarField& f) {
  QpCache c;
  c.nqp = static_cast<int>(rule.points.size());
  c.v.resize(static_cast<std::size_t>(mesh.triangle_count()) * c.nqp);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t idx = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int k = 0; k < c.nqp; ++k) {
      const auto& b = rule.points[k];
      Vec2 pt = mesh.point_at(t, b[0], b[1], b[2]);
      double val = f(pt.x, pt.y);
      c.v[idx++] = val;
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  }
  c.minv = lo;
  c.maxv = hi;
  c.constant = (lo == hi);
  return c;
}

// Quadrature points in cartesian coordinates, element-major.
inline std::vector<Vec2> sample_points(const Mesh& mesh, const QuadratureRule& rule) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(mesh.triangle_count()) * rule.points.size());
  for (int t = 0; t < mesh.triangle_count(); ++t)
    for (const auto& b : rule.points) pts.push_back(mesh.point_at(t, b[0], b[1], b[2]));
  return pts;
}

// sign(t) * |t|^{e-1}, the sign-safe power map; 0 at t = 0 (limit for e > 1).
inline double signed_power(double t, double eminus1) {
  if (t == 0.0) return 0.0;
  double m = std::pow(std::fabs(t), eminus1);
  return t > 0 ? m : -m;
}

}  // namespace dphase::detail
