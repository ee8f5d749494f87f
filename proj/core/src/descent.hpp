// Internal: the shared Armijo descent engine of the two solvers.
#pragma once

#include "dphase/mesh.hpp"
#include "dphase/nonvar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace dphase::detail {

struct Objective {
  std::function<double(const std::vector<double>&)> energy;
  // Overwrites g with the full gradient; boundary entries zeroed.
  std::function<void(const std::vector<double>&, std::vector<double>&)> gradient;
};

inline double inf_norm_free(const Mesh& mesh, const std::vector<double>& g) {
  double m = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!mesh.on_boundary(static_cast<int>(i))) m = std::max(m, std::fabs(g[i]));
  return m;
}

struct DescentOutcome {
  long iters = 0;
  double residual_inf = 0;
};

// Steepest descent with Armijo backtracking.  The trial step is seeded by
// the Barzilai-Borwein quotient of the previous accepted move, so the
// line search rarely needs more than one or two energy evaluations.
//
// Near a minimum the predicted decrease c t |g|^2 falls below the
// energy's floating-point resolution and energy comparisons go blind; in
// that regime the line search accepts on strict gradient-norm decrease
// instead, which stays well conditioned down to the assembly's rounding
// floor.  The J-trace then remains nonincreasing up to a per-step
// allowance of (1/armijo_c) * 1e-16 * (1 + |J|).
inline DescentOutcome armijo_descent(
    const Mesh& mesh, std::vector<double>& u, const Objective& obj, const DescentParams& prm,
    std::vector<double>* energy_trace,
    const std::function<void(int, double, double, const std::vector<double>&)>& per_iter = {}) {
  const std::size_t n = u.size();
  std::vector<double> g(n, 0.0), g_prev(n, 0.0), g_trial(n, 0.0), du(n, 0.0), trial(n, 0.0);

  obj.gradient(u, g);
  double res = inf_norm_free(mesh, g);
  double J = obj.energy(u);
  if (energy_trace) energy_trace->push_back(J);
  if (per_iter) per_iter(0, J, res, u);

  double step = prm.step0;
  bool have_prev = false;

  DescentOutcome out;
  bool converged = false;
  for (int iter = 1; iter <= prm.max_iters; ++iter) {
    if (res < prm.tol_res) {
      converged = true;
      break;
    }
    out.iters = iter;

    double gg = 0;
    for (double v : g) gg += v * v;

    double t = step;
    if (have_prev) {
      double ss = 0, sy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double dg = g[i] - g_prev[i];
        ss += du[i] * du[i];
        sy += du[i] * dg;
      }
      t = (sy > 0) ? ss / sy : step / prm.backtrack;
      t = std::clamp(t, 1e-14, 1e8);
    }

    const double noise = 1e-16 * (1.0 + std::fabs(J));
    double J_new = J;
    bool have_new_grad = false;
    int bt = 0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - t * g[i];
      bool ok;
      if (prm.armijo_c * t * gg > noise) {
        J_new = obj.energy(trial);
        ok = J_new <= J - prm.armijo_c * t * gg + noise;
        have_new_grad = false;
      } else {
        // Energy-blind regime: require the gradient norm itself to drop
        // (the 2-norm contracts along small gradient steps near a
        // minimum, unlike the max norm).  Such steps can move the energy
        // by at most armijo_c^{-1} * noise, which bounds the wiggle of
        // the J-trace.
        obj.gradient(trial, g_trial);
        double gg_trial = 0;
        for (double v : g_trial) gg_trial += v * v;
        ok = gg_trial < gg;
        have_new_grad = ok;
        if (ok) J_new = obj.energy(trial);
      }
      if (ok) break;
      t *= prm.backtrack;
      if (++bt > 80) {
        DiscreteFunction best(mesh);
        best.values() = u;
        throw NonConvergence("descent: line search stalled at residual " + std::to_string(res),
                             std::move(best), res);
      }
    }

    for (std::size_t i = 0; i < n; ++i) du[i] = trial[i] - u[i];
    u.swap(trial);
    g_prev.swap(g);
    if (have_new_grad)
      g.swap(g_trial);
    else
      obj.gradient(u, g);
    have_prev = true;
    step = t;
    J = J_new;
    res = inf_norm_free(mesh, g);
    if (energy_trace) energy_trace->push_back(J);
    if (per_iter) per_iter(iter, J, res, u);
  }

  out.residual_inf = res;
  if (!converged && res >= prm.tol_res) {
    DiscreteFunction best(mesh);
    best.values() = u;
    throw NonConvergence("descent: iteration budget exhausted at residual " + std::to_string(res),
                         std::move(best), res);
  }
  return out;
}

}  // namespace dphase::detail
