#pragma once

#include "dphase/operators.hpp"

#include <stdexcept>
#include <vector>

namespace dphase {

// Right-hand side of the nonvariational problem.  In Convective mode the
// effective source is g - nu . grad(u), re-assembled around each outer
// iterate.
struct RhsSpec {
  enum class Mode { Fixed, Convective };

  Mode mode = Mode::Fixed;
  ScalarField g = ScalarField::constant(0.0, "g");
  Vec2 nu{0, 0};
};

struct DescentParams {
  double tol_res = 1e-8;   // max residual entry over free vertices
  int max_iters = 10000;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double step0 = 1.0;
};

struct OuterParams {
  double tol_fix = 1e-7;   // relative ||u_{k+1} - u_k||_{1,H,0}
  int max_outer = 200;
  double damping = 1.0;    // θ: u_{k+1} = (1-θ) u_k + θ solve(f(u_k))
};

struct OuterTraceRow {
  int iter = 0;
  double J = 0;
  double residual_inf = 0;
  double delta_norm = 0;
};

struct SolveReport {
  DiscreteFunction u;
  int outer_iters = 0;
  long inner_iters = 0;
  double residual_inf = 0;
  double delta_norm = 0;
  std::vector<double> energy_trace;      // inner J values, nonincreasing
  std::vector<OuterTraceRow> outer_trace;
  bool converged = false;
  bool contractive = false;              // delta trace geometrically decreasing
  bool trivial = false;                  // ||u||_{1,H,0} < 1e-10
  double norm_u = 0;
  double gl_bound_slack = 0;             // min slack of the convection bound (gl runs)
};

// Iteration budget exhausted; carries the best iterate and its residual.
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(std::string message, DiscreteFunction best, double residual)
      : std::runtime_error(std::move(message)), best_(std::move(best)), residual_(residual) {}
  const DiscreteFunction& best() const { return best_; }
  double residual() const { return residual_; }

private:
  DiscreteFunction best_;
  double residual_;
};

// Assembled dual vector f_i = ∫ g φ_i (plus the convection term when u is
// given).
std::vector<double> assemble_rhs(const Mesh& mesh, const RhsSpec& rhs,
                                 const DiscreteFunction* u = nullptr);

// Minimizes J(u) = Phi(u) + L(u) - Σ f_i u_i over the free nodal values by
// steepest descent with Armijo backtracking (Barzilai-Borwein trial step),
// until max_i |T(u)_i - f_i| < tol_res.
DiscreteFunction solve_monotone(const std::vector<double>& fvec, const Mesh& mesh,
                                const FieldSet& fields, const DescentParams& params = {},
                                std::vector<double>* energy_trace = nullptr,
                                long* iterations = nullptr,
                                const DiscreteFunction* warm_start = nullptr);

// Outer Picard fixed point over the gradient-dependent right-hand side
// wrapped around the inner monotone solve.
SolveReport solve_convection(const RhsSpec& rhs, const Mesh& mesh, const FieldSet& fields,
                             const DescentParams& params = {}, const OuterParams& outer = {});

// Ginzburg-Landau example: p = r = 2, mu = 0, gamma = 1, f = g - nu . grad(psi).
SolveReport gl_solve(Vec2 nu, double alpha, const ScalarField& g, const Mesh& mesh,
                     const DescentParams& params = {}, const OuterParams& outer = {});

// <T(u)-T(v), u-v>
double monotonicity_probe(const DiscreteFunction& u, const DiscreteFunction& v,
                          const FieldSet& fields);

// <T(t w), t w> / ||t w||_{1,H,0} along the given t grid.
std::vector<double> coercivity_probe(const DiscreteFunction& w, const std::vector<double>& t_grid,
                                     const FieldSet& fields);

// max jump of Υ(θ) = <T(u+θw), v> over adjacent grid values.
double hemicontinuity_probe(const DiscreteFunction& u, const DiscreteFunction& w,
                            const DiscreteFunction& v, const std::vector<double>& theta_grid,
                            const FieldSet& fields);

}  // namespace dphase
