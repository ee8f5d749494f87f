#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace dphase {

struct Vec2 {
  double x = 0, y = 0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Triangle {
  std::array<int, 3> v;
};

// 2-D simplicial triangulation with a Dirichlet boundary mask.  Immutable
// after construction; all triangles have positive signed area.
class Mesh {
public:
  // Structured crisscross triangulation of [x0,x1]x[y0,y1] with
  // 2*nx*ny triangles and (nx+1)*(ny+1) vertices.
  static Mesh rect(double x0, double y0, double x1, double y1, int nx, int ny);

  // Polygonal disc approximation built from concentric hexagonal rings;
  // the ring count doubles with each refinement level.
  static Mesh disc(Vec2 center, double radius, int levels);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  bool on_boundary(int i) const { return boundary_[i] != 0; }
  int boundary_count() const;

  double area(int t) const { return areas_[t]; }
  double total_area() const;
  // Gradients of the three nodal hat functions on triangle t (constant
  // on the triangle).
  const std::array<Vec2, 3>& basis_gradients(int t) const { return grads_[t]; }
  Vec2 point_at(int t, double l0, double l1, double l2) const;

  std::vector<int> free_vertices() const;
  const std::vector<std::vector<int>>& vertex_triangles() const { return vert_tris_; }

  // Structural checks: positive areas, manifold edges (boundary edges in
  // exactly one triangle, interior edges in exactly two), and the
  // boundary mask matching edge topology.  Throws on violation.
  void validate() const;

  // CSV dump with VERTICES (id,x,y,boundary) and TRIANGLES (id,v0,v1,v2)
  // sections.
  void write_csv(std::ostream& os) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> boundary_;
  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> grads_;
  std::vector<std::vector<int>> vert_tris_;

  void finalize();
};

// Barycentric quadrature on the reference triangle; weights sum to 1.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 1;

  // 1-point centroid rule, exact for degree 1.
  static const QuadratureRule& midpoint();
  // 3 interior points, exact for degree 2.  Used wherever the integrand
  // is nonlinear in u along an element.
  static const QuadratureRule& three_point();
};

// Piecewise-linear nodal function on a mesh.  Plain interpolants carry
// whatever nodal values the function has; W_0-members additionally have
// zero values at boundary vertices (enforced by interpolate_w0 /
// clamp_boundary_to_zero, asserted by the solvers).
class DiscreteFunction {
public:
  DiscreteFunction() = default;
  explicit DiscreteFunction(const Mesh& mesh);

  static DiscreteFunction interpolate(const Mesh& mesh,
                                      const std::function<double(double, double)>& f);
  static DiscreteFunction interpolate_w0(const Mesh& mesh,
                                         const std::function<double(double, double)>& f);

  const Mesh& mesh() const { return *mesh_; }
  bool attached() const { return mesh_ != nullptr; }
  int size() const { return static_cast<int>(values_.size()); }
  double& operator[](int i) { return values_[i]; }
  double operator[](int i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double value_at(int t, const std::array<double, 3>& bary) const;
  bool is_zero() const;
  bool boundary_values_are_zero() const;
  void clamp_boundary_to_zero();

  // CSV rows x,y,value (17 significant digits).
  void write_csv(std::ostream& os) const;

private:
  const Mesh* mesh_ = nullptr;
  std::vector<double> values_;
};

// Constant gradient of the linear interpolant on triangle t.
Vec2 element_gradient(const DiscreteFunction& u, int t);

class IntegrationError : public std::runtime_error {
public:
  IntegrationError(int element, const std::string& message)
      : std::runtime_error(message), element_(element) {}
  int element() const noexcept { return element_; }

private:
  int element_;
};

// Quadrature integral of density(point, element) over the mesh.  Throws
// IntegrationError when the density is non-finite at a quadrature point.
double integrate(const Mesh& mesh, const std::function<double(Vec2, int)>& density,
                 const QuadratureRule& rule = QuadratureRule::midpoint());

}  // namespace dphase
