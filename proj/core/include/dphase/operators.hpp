#pragma once

#include "dphase/field.hpp"
#include "dphase/mesh.hpp"

#include <optional>
#include <vector>

namespace dphase {

// Nodal residual array: entry i is the pairing of a functional derivative
// with the hat function of vertex i.  Entries at Dirichlet-constrained
// vertices are kept in the array and fixed at zero by convention.
struct ResidualVector {
  const Mesh* mesh = nullptr;
  std::vector<double> entries;

  double inf_norm_free() const;
  void zero_boundary();
};

// The nonlinearity f(x,t) of the variational problem.  The built-in
// family is f = c1 + c2 |t|^{s(x)-2} t, whose growth bound
// |f| <= c1 + c2 |t|^{s(x)-1} holds by construction and whose primitive
// has closed form.  Free-form expressions integrate F by adaptive
// Simpson quadrature (tolerance 1e-9).
struct NonlinearitySpec {
  enum class Family { PaperF1, Expression };

  Family family = Family::PaperF1;
  double c1 = 0, c2 = 0;
  ScalarField s = ScalarField::constant(1.8, "s");
  std::optional<Expr> f_expr;

  static NonlinearitySpec paper_f1(double c1, double c2, ScalarField s);
  static NonlinearitySpec expression(Expr f, ScalarField s, double c1, double c2);

  double f(double x, double y, double t) const;
  double F(double x, double y, double t) const;  // = ∫_0^t f(x,s) ds
};

// Phi(u) = ∫ (|∇u|^{p}/p + mu |∇u|^{q}/q)
double energy_Phi(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                  const ScalarField& mu);
ResidualVector grad_Phi(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                        const ScalarField& mu);

// L(u) = ∫ (alpha/2)(|u|^{r}/r - gamma)^2
double energy_L(const DiscreteFunction& u, const ScalarField& alpha, const ScalarField& gamma,
                const ScalarField& r);
ResidualVector grad_L(const DiscreteFunction& u, const ScalarField& alpha,
                      const ScalarField& gamma, const ScalarField& r);

// Growth bound of the double-well term: C |alpha|_inf / (r^-)^2 * ||u||^{2 r_M}.
double energy_L_bound(double embedding_constant, double alpha_sup, double r_minus,
                      double r_max, double norm_u);

// Psi(u) = ∫ F(x,u)
double energy_Psi(const DiscreteFunction& u, const NonlinearitySpec& spec);
ResidualVector grad_Psi(const DiscreteFunction& u, const NonlinearitySpec& spec);

// T = Phi' + L', the full operator of the nonvariational problem.
ResidualVector apply_T(const DiscreteFunction& u, const FieldSet& fields);

// Slack of c_m |a-b| (|a|+|b|)^{m-2} - | |a|^{m-2}a - |b|^{m-2}b | with
// the sufficient constant c_m = 2^m; nonnegative when the bound holds.
double ineq_kernel_36(Vec2 a, Vec2 b, double m);

// Slack of (|x|^{s-2}x - |y|^{s-2}y)·(x-y) - 2^{-s}|x-y|^s.  The bound
// holds for s >= 2; below 2 it fails for nearby x, y of moderate norm,
// which is why the randomized sweeps only use s >= 2.
double ineq_kernel_37(Vec2 x, Vec2 y, double s);

}  // namespace dphase
