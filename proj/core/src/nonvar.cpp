#include "dphase/nonvar.hpp"

#include "assembly.hpp"
#include "descent.hpp"
#include "dphase/musielak.hpp"

#include <algorithm>
#include <cmath>

namespace dphase {

namespace {

using detail::LData;
using detail::PhiData;

bool geometric_decrease(const std::vector<double>& deltas) {
  if (deltas.size() < 3) return false;
  for (std::size_t k = 2; k < deltas.size(); ++k) {
    if (deltas[k - 1] == 0.0) continue;
    if (deltas[k] >= deltas[k - 1]) return false;
  }
  return true;
}

}  // namespace

std::vector<double> assemble_rhs(const Mesh& mesh, const RhsSpec& rhs,
                                 const DiscreteFunction* u) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  detail::QpCache gc = detail::sample_field(mesh, rule, rhs.g);
  const int nqp = static_cast<int>(rule.points.size());
  std::vector<double> f(mesh.vertex_count(), 0.0);
  const bool convective = rhs.mode == RhsSpec::Mode::Convective && u != nullptr;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    double A = mesh.area(t);
    double conv = 0;
    if (convective) {
      Vec2 grad = element_gradient(*u, t);
      conv = rhs.nu.dot(grad);
    }
    for (int k = 0; k < nqp; ++k) {
      double w = rule.weights[k] * A * (gc.at(t, k) - conv);
      const auto& b = rule.points[k];
      for (int j = 0; j < 3; ++j) f[tri.v[j]] += w * b[j];
    }
  }
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (mesh.on_boundary(i)) f[i] = 0.0;
  return f;
}

DiscreteFunction solve_monotone(const std::vector<double>& fvec, const Mesh& mesh,
                                const FieldSet& fields, const DescentParams& params,
                                std::vector<double>* energy_trace, long* iterations,
                                const DiscreteFunction* warm_start) {
  PhiData pd = detail::make_phi_data(mesh, fields.p, fields.q, fields.mu);
  LData ld = detail::make_L_data(mesh, fields.alpha, fields.gamma, fields.r);

  detail::Objective obj;
  obj.energy = [&](const std::vector<double>& u) {
    double e = detail::phi_energy(pd, u) + detail::L_energy(ld, u);
    for (std::size_t i = 0; i < u.size(); ++i) e -= fvec[i] * u[i];
    return e;
  };
  obj.gradient = [&](const std::vector<double>& u, std::vector<double>& g) {
    std::fill(g.begin(), g.end(), 0.0);
    detail::phi_grad_add(pd, u, 1.0, g);
    detail::L_grad_add(ld, u, 1.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= fvec[i];
    for (int i = 0; i < mesh.vertex_count(); ++i)
      if (mesh.on_boundary(i)) g[i] = 0.0;
  };

  DiscreteFunction u = warm_start ? *warm_start : DiscreteFunction(mesh);
  u.clamp_boundary_to_zero();
  detail::DescentOutcome res = detail::armijo_descent(mesh, u.values(), obj, params, energy_trace);
  if (iterations) *iterations += res.iters;
  return u;
}

SolveReport solve_convection(const RhsSpec& rhs, const Mesh& mesh, const FieldSet& fields,
                             const DescentParams& params, const OuterParams& outer) {
  PhiData pd = detail::make_phi_data(mesh, fields.p, fields.q, fields.mu);
  LData ld = detail::make_L_data(mesh, fields.alpha, fields.gamma, fields.r);

  SolveReport rep;
  rep.u = DiscreteFunction(mesh);

  DescentParams inner = params;
  if (rhs.mode == RhsSpec::Mode::Convective) inner.tol_res = 0.5 * params.tol_res;

  std::vector<double> deltas;
  DiscreteFunction u(mesh);
  for (int k = 1; k <= outer.max_outer; ++k) {
    rep.outer_iters = k;
    std::vector<double> fvec = assemble_rhs(mesh, rhs, &u);
    DiscreteFunction unew =
        solve_monotone(fvec, mesh, fields, inner, &rep.energy_trace, &rep.inner_iters, &u);
    if (outer.damping != 1.0) {
      for (int i = 0; i < unew.size(); ++i)
        unew[i] = (1.0 - outer.damping) * u[i] + outer.damping * unew[i];
      unew.clamp_boundary_to_zero();
    }

    std::vector<double> diff(unew.size());
    for (int i = 0; i < unew.size(); ++i) diff[i] = unew[i] - u[i];
    double delta = detail::w1h0_norm(pd, diff);
    deltas.push_back(delta);
    u = unew;

    // Residual of the convective equation at the new iterate.
    std::vector<double> fv_now = assemble_rhs(mesh, rhs, &u);
    std::vector<double> g(u.size(), 0.0);
    detail::phi_grad_add(pd, u.values(), 1.0, g);
    detail::L_grad_add(ld, u.values(), 1.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= fv_now[i];
    double res = detail::inf_norm_free(mesh, g);

    double norm_u = detail::w1h0_norm(pd, u.values());
    rep.residual_inf = res;
    rep.delta_norm = delta;
    rep.norm_u = norm_u;
    rep.outer_trace.push_back(
        {k, rep.energy_trace.empty() ? 0 : rep.energy_trace.back(), res, delta});

    if (delta <= outer.tol_fix * std::max(1.0, norm_u) && res < params.tol_res) {
      rep.converged = true;
      break;
    }
  }

  rep.u = u;
  rep.contractive = geometric_decrease(deltas);
  rep.trivial = rep.norm_u < 1e-10;
  if (!rep.converged) {
    throw NonConvergence(
        "solve_convection: no fixed point within " + std::to_string(outer.max_outer) +
            " outer iterations (consider reducing damping)",
        rep.u, rep.residual_inf);
  }
  return rep;
}

SolveReport gl_solve(Vec2 nu, double alpha, const ScalarField& g, const Mesh& mesh,
                     const DescentParams& params, const OuterParams& outer) {
  if (!(alpha > 0)) throw std::invalid_argument("gl_solve: alpha must be positive");
  FieldSet fields;
  fields.p = ScalarField::constant(2.0, "p");
  fields.q = ScalarField::constant(2.0, "q");
  fields.mu = ScalarField::constant(0.0, "mu");
  fields.alpha = ScalarField::constant(alpha, "alpha");
  fields.gamma = ScalarField::constant(1.0, "gamma");
  fields.r = ScalarField::constant(2.0, "r");

  RhsSpec rhs;
  rhs.mode = RhsSpec::Mode::Convective;
  rhs.g = g;
  rhs.nu = nu;

  SolveReport rep = solve_convection(rhs, mesh, fields, params, outer);

  // Boundedness certificate of the convection functional against every
  // nodal test function: |∫(nu·grad psi) φ_i| <= |nu| |grad psi|_2 |φ_i|_2.
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  std::vector<double> conv(mesh.vertex_count(), 0.0);
  std::vector<double> phi_l2sq(mesh.vertex_count(), 0.0);
  double grad_l2sq = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    double A = mesh.area(t);
    Vec2 grad = element_gradient(rep.u, t);
    grad_l2sq += A * grad.dot(grad);
    double cdot = nu.dot(grad);
    for (int k = 0; k < nqp; ++k) {
      const auto& b = rule.points[k];
      for (int j = 0; j < 3; ++j) {
        conv[tri.v[j]] += rule.weights[k] * A * cdot * b[j];
        phi_l2sq[tri.v[j]] += rule.weights[k] * A * b[j] * b[j];
      }
    }
  }
  double nunorm = nu.norm();
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    if (mesh.on_boundary(i)) continue;
    double bound = nunorm * std::sqrt(grad_l2sq) * std::sqrt(phi_l2sq[i]);
    min_slack = std::min(min_slack, bound - std::fabs(conv[i]));
  }
  rep.gl_bound_slack = min_slack;
  return rep;
}

double monotonicity_probe(const DiscreteFunction& u, const DiscreteFunction& v,
                          const FieldSet& fields) {
  ResidualVector tu = apply_T(u, fields);
  ResidualVector tv = apply_T(v, fields);
  double acc = 0;
  for (int i = 0; i < u.size(); ++i) acc += (tu.entries[i] - tv.entries[i]) * (u[i] - v[i]);
  return acc;
}

std::vector<double> coercivity_probe(const DiscreteFunction& w, const std::vector<double>& t_grid,
                                     const FieldSet& fields) {
  std::vector<double> ratios;
  ratios.reserve(t_grid.size());
  const Mesh& mesh = w.mesh();
  for (double t : t_grid) {
    DiscreteFunction tw(mesh);
    for (int i = 0; i < w.size(); ++i) tw[i] = t * w[i];
    ResidualVector T = apply_T(tw, fields);
    double pairing = 0;
    for (int i = 0; i < tw.size(); ++i) pairing += T.entries[i] * tw[i];
    double n = norm_W1H0(tw, fields.p, fields.q, fields.mu);
    ratios.push_back(n > 0 ? pairing / n : 0.0);
  }
  return ratios;
}

double hemicontinuity_probe(const DiscreteFunction& u, const DiscreteFunction& w,
                            const DiscreteFunction& v, const std::vector<double>& theta_grid,
                            const FieldSet& fields) {
  const Mesh& mesh = u.mesh();
  double max_jump = 0;
  double prev = 0;
  bool have_prev = false;
  for (double theta : theta_grid) {
    DiscreteFunction ut(mesh);
    for (int i = 0; i < u.size(); ++i) ut[i] = u[i] + theta * w[i];
    ResidualVector T = apply_T(ut, fields);
    double val = 0;
    for (int i = 0; i < v.size(); ++i) val += T.entries[i] * v[i];
    if (have_prev) max_jump = std::max(max_jump, std::fabs(val - prev));
    prev = val;
    have_prev = true;
  }
  return max_jump;
}

}  // namespace dphase
