#pragma once

#include "dphase/expr.hpp"

#include <string>

namespace dphase {

// Axis-aligned rectangle or disc: the spatial region the fields (and the
// mesh) live on.
struct DomainSpec {
  enum class Shape { Rect, Disc };

  Shape shape = Shape::Rect;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;  // Rect bounds
  double cx = 0, cy = 0, radius = 1;      // Disc center and radius

  static DomainSpec rect(double x0, double y0, double x1, double y1);
  static DomainSpec disc(double cx, double cy, double radius);

  void bounding_box(double& bx0, double& by0, double& bx1, double& by1) const;
  bool contains(double x, double y) const;  // closed region
  // Radius of the largest ball inscribed in the domain, and its center.
  double inscribed_radius() const;
  void center(double& x, double& y) const;
};

// A spatial coefficient or exponent defined by an expression in x, y.
// The label is the role it plays (p, q, r, s, mu, alpha, gamma, ...).
struct ScalarField {
  Expr expr;
  std::string label;

  ScalarField() = default;
  ScalarField(Expr e, std::string lbl) : expr(std::move(e)), label(std::move(lbl)) {}

  static ScalarField parse(std::string_view src, std::string label);
  static ScalarField constant(double value, std::string label);

  double operator()(double x, double y) const { return expr.eval(x, y); }
  bool is_constant() const { return expr.is_constant(); }
};

// The full data set of the two problems.  Unused members default to the
// constant 1 so partially specified problems stay well defined.
struct FieldSet {
  ScalarField p = ScalarField::constant(2.5, "p");
  ScalarField q = ScalarField::constant(2.8, "q");
  ScalarField r = ScalarField::constant(2.0, "r");
  ScalarField s = ScalarField::constant(1.8, "s");
  ScalarField mu = ScalarField::constant(1.0, "mu");
  ScalarField alpha = ScalarField::constant(1.0, "alpha");
  ScalarField gamma = ScalarField::constant(1.0, "gamma");
};

struct Extrema {
  double low = 0;
  double high = 0;
};

// Min and max of f over the n-by-n sample grid of the domain's bounding
// box restricted to the domain itself.  n >= 2 per axis.
Extrema field_extrema(const ScalarField& f, const DomainSpec& domain, int n);

// Exponent fields must stay strictly above 1 (membership in C_+): the
// sampled margin min f - 1 must exceed 1e-12.  Returns the margin.
bool exponent_field_ok(const ScalarField& f, const DomainSpec& domain, int n,
                       double* margin = nullptr);

}  // namespace dphase
