#include "dphase/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dphase {

double Vec2::norm() const { return std::hypot(x, y); }

namespace {

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void Mesh::finalize() {
  areas_.resize(triangles_.size());
  grads_.resize(triangles_.size());
  vert_tris_.assign(vertices_.size(), {});
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    Vec2 a = vertices_[tri.v[0]], b = vertices_[tri.v[1]], c = vertices_[tri.v[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (!(det > 0))
      throw std::runtime_error("mesh: triangle " + std::to_string(t) +
                               " has nonpositive signed area");
    areas_[t] = 0.5 * det;
    // Hat-function gradients: grad(lambda_i) is the inward normal of the
    // opposite edge scaled by 1/det.
    grads_[t][0] = Vec2{(b.y - c.y) / det, (c.x - b.x) / det};
    grads_[t][1] = Vec2{(c.y - a.y) / det, (a.x - c.x) / det};
    grads_[t][2] = Vec2{(a.y - b.y) / det, (b.x - a.x) / det};
    for (int k = 0; k < 3; ++k) vert_tris_[tri.v[k]].push_back(static_cast<int>(t));
  }
}

Mesh Mesh::rect(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("mesh: degenerate rectangle");
  if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: nx, ny must be >= 1");

  Mesh m;
  m.vertices_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    double y = y0 + (y1 - y0) * j / ny;
    for (int i = 0; i <= nx; ++i) {
      double x = x0 + (x1 - x0) * i / nx;
      m.vertices_.push_back({x, y});
      m.boundary_.push_back(i == 0 || i == nx || j == 0 || j == ny ? 1 : 0);
    }
  }
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.triangles_.reserve(static_cast<std::size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles_.push_back({{v00, v10, v11}});
        m.triangles_.push_back({{v00, v11, v01}});
      } else {
        m.triangles_.push_back({{v00, v10, v01}});
        m.triangles_.push_back({{v10, v11, v01}});
      }
    }
  }
  m.finalize();
  return m;
}

Mesh Mesh::disc(Vec2 center, double radius, int levels) {
  if (!(radius > 0)) throw std::invalid_argument("mesh: disc radius must be positive");
  if (levels < 1) throw std::invalid_argument("mesh: levels must be >= 1");

  // Ring k of m has radius k*R/m and 6k vertices; m doubles per level.
  int rings = 1 << levels;

  Mesh m;
  m.vertices_.push_back(center);
  m.boundary_.push_back(0);
  std::vector<int> ring_start(rings + 1, 0);
  for (int k = 1; k <= rings; ++k) {
    ring_start[k] = static_cast<int>(m.vertices_.size());
    double r = radius * k / rings;
    int n = 6 * k;
    for (int j = 0; j < n; ++j) {
      double a = 2.0 * M_PI * j / n;
      m.vertices_.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
      m.boundary_.push_back(k == rings ? 1 : 0);
    }
  }

  auto ring_vertex = [&](int k, int j) {
    if (k == 0) return 0;
    int n = 6 * k;
    return ring_start[k] + ((j % n) + n) % n;
  };

  // Stitch ring k-1 (inner) to ring k (outer), sector by sector.  In
  // sector s the outer ring contributes k edges and the inner ring k-1,
  // giving 2k-1 triangles.
  for (int k = 1; k <= rings; ++k) {
    for (int s = 0; s < 6; ++s) {
      int outer0 = s * k;            // index of the sector's first outer vertex
      int inner0 = s * (k - 1);      // same for the inner ring
      for (int j = 0; j < k; ++j) {
        int o0 = ring_vertex(k, outer0 + j);
        int o1 = ring_vertex(k, outer0 + j + 1);
        int in = ring_vertex(k - 1, inner0 + j);
        m.triangles_.push_back({{in, o0, o1}});
        if (j + 1 < k) {
          int in1 = ring_vertex(k - 1, inner0 + j + 1);
          m.triangles_.push_back({{in, o1, in1}});
        }
      }
    }
  }
  m.finalize();
  return m;
}

int Mesh::boundary_count() const {
  int n = 0;
  for (auto b : boundary_) n += b;
  return n;
}

double Mesh::total_area() const {
  double a = 0;
  for (double t : areas_) a += t;
  return a;
}

Vec2 Mesh::point_at(int t, double l0, double l1, double l2) const {
  const auto& tri = triangles_[t];
  Vec2 a = vertices_[tri.v[0]], b = vertices_[tri.v[1]], c = vertices_[tri.v[2]];
  return {l0 * a.x + l1 * b.x + l2 * c.x, l0 * a.y + l1 * b.y + l2 * c.y};
}

std::vector<int> Mesh::free_vertices() const {
  std::vector<int> f;
  for (int i = 0; i < vertex_count(); ++i)
    if (!boundary_[i]) f.push_back(i);
  return f;
}

void Mesh::validate() const {
  // Areas were checked in finalize(); recheck to keep this self-contained.
  for (int t = 0; t < triangle_count(); ++t)
    if (!(areas_[t] > 0))
      throw std::runtime_error("mesh: nonpositive area in triangle " + std::to_string(t));

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      int a = tri.v[k], b = tri.v[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  std::vector<std::uint8_t> on_boundary_edge(vertices_.size(), 0);
  for (const auto& [e, c] : edge_count) {
    if (c != 1 && c != 2)
      throw std::runtime_error("mesh: edge shared by " + std::to_string(c) + " triangles");
    if (c == 1) {
      on_boundary_edge[e.first] = 1;
      on_boundary_edge[e.second] = 1;
    }
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (boundary_[i] != on_boundary_edge[i])
      throw std::runtime_error("mesh: boundary mask mismatch at vertex " + std::to_string(i));
  }
}

void Mesh::write_csv(std::ostream& os) const {
  std::string out = "VERTICES\n";
  for (int i = 0; i < vertex_count(); ++i) {
    out += std::to_string(i);
    out += ',';
    format_double(out, vertices_[i].x);
    out += ',';
    format_double(out, vertices_[i].y);
    out += ',';
    out += boundary_[i] ? '1' : '0';
    out += '\n';
  }
  out += "TRIANGLES\n";
  for (int t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles_[t];
    out += std::to_string(t);
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += std::to_string(tri.v[k]);
    }
    out += '\n';
  }
  os << out;
}

const QuadratureRule& QuadratureRule::midpoint() {
  static const QuadratureRule rule{
      {{1.0 / 3, 1.0 / 3, 1.0 / 3}},
      {1.0},
      1,
  };
  return rule;
}

const QuadratureRule& QuadratureRule::three_point() {
  static const QuadratureRule rule{
      {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}},
      {1.0 / 3, 1.0 / 3, 1.0 / 3},
      2,
  };
  return rule;
}

DiscreteFunction::DiscreteFunction(const Mesh& mesh)
    : mesh_(&mesh), values_(mesh.vertex_count(), 0.0) {}

DiscreteFunction DiscreteFunction::interpolate(const Mesh& mesh,
                                               const std::function<double(double, double)>& f) {
  DiscreteFunction u(mesh);
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Vec2& v = mesh.vertex(i);
    u.values_[i] = f(v.x, v.y);
  }
  return u;
}

DiscreteFunction DiscreteFunction::interpolate_w0(
    const Mesh& mesh, const std::function<double(double, double)>& f) {
  DiscreteFunction u = interpolate(mesh, f);
  u.clamp_boundary_to_zero();
  return u;
}

double DiscreteFunction::value_at(int t, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_->triangle(t);
  return bary[0] * values_[tri.v[0]] + bary[1] * values_[tri.v[1]] + bary[2] * values_[tri.v[2]];
}

bool DiscreteFunction::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

bool DiscreteFunction::boundary_values_are_zero() const {
  for (int i = 0; i < size(); ++i)
    if (mesh_->on_boundary(i) && values_[i] != 0.0) return false;
  return true;
}

void DiscreteFunction::clamp_boundary_to_zero() {
  for (int i = 0; i < size(); ++i)
    if (mesh_->on_boundary(i)) values_[i] = 0.0;
}

void DiscreteFunction::write_csv(std::ostream& os) const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    const Vec2& v = mesh_->vertex(i);
    format_double(out, v.x);
    out += ',';
    format_double(out, v.y);
    out += ',';
    format_double(out, values_[i]);
    out += '\n';
  }
  os << out;
}

Vec2 element_gradient(const DiscreteFunction& u, int t) {
  const Mesh& m = u.mesh();
  const auto& tri = m.triangle(t);
  const auto& g = m.basis_gradients(t);
  Vec2 grad{0, 0};
  for (int k = 0; k < 3; ++k) {
    grad.x += u[tri.v[k]] * g[k].x;
    grad.y += u[tri.v[k]] * g[k].y;
  }
  return grad;
}

double integrate(const Mesh& mesh, const std::function<double(Vec2, int)>& density,
                 const QuadratureRule& rule) {
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double cell = 0;
    for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
      const auto& b = rule.points[qp];
      double v = density(mesh.point_at(t, b[0], b[1], b[2]), t);
      if (!std::isfinite(v))
        throw IntegrationError(t, "integrate: non-finite density in element " + std::to_string(t));
      cell += rule.weights[qp] * v;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

}  // namespace dphase
