#pragma once

#include "dphase/nonvar.hpp"
#include "dphase/operators.hpp"

#include <vector>

namespace dphase {

// The radial cut-off competitor: plateau r_lambda on B(center, R/2),
// linear decay to 0 across the annulus, 0 outside B(center, R).
struct CutoffSpec {
  Vec2 center{0, 0};
  double R = 1;
  double r_lambda = 0.2;
};

// Nodal interpolant of the cut-off.  Requires r_lambda in (0,1) and
// B(center,R) inside the meshed domain (every boundary vertex at distance
// >= R from the center).
DiscreteFunction cutoff_u_bar(const CutoffSpec& spec, const Mesh& mesh);

struct PsRow {
  int iter = 0;
  double I = 0;
  double Phi = 0;
  double grad_inf = 0;
};

struct VarSolveReport {
  DiscreteFunction u;
  double I_value = 0;
  double Phi_value = 0;
  double Psi_value = 0;
  double residual_inf = 0;
  double norm_u = 0;
  bool nontrivial = false;  // I_value < -1e-12 (I(0) = 0 baseline)
  bool converged = false;
  bool cap_held = true;     // Phi(u_n) < 1 along the whole run
  int iters = 0;
  std::vector<PsRow> ps_trace;
};

// Descent with Armijo backtracking on I = Phi - lambda Psi from the given
// start (typically the cut-off).  The Phi < 1 cap is monitored, not
// enforced.
VarSolveReport minimize_I(double lambda, const NonlinearitySpec& nonlin, const ScalarField& p,
                          const ScalarField& q, const ScalarField& mu,
                          const DiscreteFunction& start, const DescentParams& params = {
                              .tol_res = 1e-8, .max_iters = 20000});

// True iff the minimum is strictly negative: the trivial function has
// I(0) = 0, so a negative value certifies u != 0.
bool certify_nontrivial(const VarSolveReport& report);

// Two-sided bounds for Phi(u_bar) with the annulus measure supplied by
// the caller (analytic or mesh-level).
double cutoff_phi_lower_bound(double r_lambda, double R, double p_minus, double p_plus,
                              double q_plus, double annulus_measure);
double cutoff_phi_upper_bound(double r_lambda, double R, double p_minus, double q_plus,
                              double mu_sup, double annulus_measure);

}  // namespace dphase
