#include "dphase/operators.hpp"

#include "assembly.hpp"
#include "dphase/musielak.hpp"

#include <cmath>
#include <stdexcept>

namespace dphase {

double ResidualVector::inf_norm_free() const {
  double m = 0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (!mesh->on_boundary(static_cast<int>(i))) m = std::max(m, std::fabs(entries[i]));
  return m;
}

void ResidualVector::zero_boundary() {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (mesh->on_boundary(static_cast<int>(i))) entries[i] = 0.0;
}

NonlinearitySpec NonlinearitySpec::paper_f1(double c1, double c2, ScalarField s) {
  if (c1 < 0 || c2 < 0) throw std::invalid_argument("nonlinearity: c1, c2 must be >= 0");
  NonlinearitySpec spec;
  spec.family = Family::PaperF1;
  spec.c1 = c1;
  spec.c2 = c2;
  spec.s = std::move(s);
  return spec;
}

NonlinearitySpec NonlinearitySpec::expression(Expr f, ScalarField s, double c1, double c2) {
  NonlinearitySpec spec;
  spec.family = Family::Expression;
  spec.f_expr = std::move(f);
  spec.s = std::move(s);
  spec.c1 = c1;
  spec.c2 = c2;
  return spec;
}

double NonlinearitySpec::f(double x, double y, double t) const {
  if (family == Family::PaperF1)
    return c1 + c2 * detail::signed_power(t, s(x, y) - 1.0);
  return f_expr->eval(x, y, t);
}

namespace {

// Adaptive Simpson on [a,b] with absolute tolerance eps.
double simpson(const std::function<double(double)>& g, double a, double m, double b,
               double fa, double fm, double fb, double whole, double eps, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(g, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson(g, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_integral(const std::function<double(double)>& g, double a, double b, double eps) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = g(a), fm = g(m), fb = g(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(g, a, m, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace

double NonlinearitySpec::F(double x, double y, double t) const {
  if (family == Family::PaperF1) {
    double sx = s(x, y);
    return c1 * t + c2 * std::pow(std::fabs(t), sx) / sx;
  }
  return adaptive_integral([&](double tau) { return f_expr->eval(x, y, tau); }, 0.0, t, 1e-9);
}

namespace detail {

PhiData make_phi_data(const Mesh& mesh, const ScalarField& p, const ScalarField& q,
                      const ScalarField& mu) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  PhiData d;
  d.mesh = &mesh;
  d.p = sample_field(mesh, rule, p);
  d.q = sample_field(mesh, rule, q);
  d.mu = sample_field(mesh, rule, mu);
  if (d.mu.minv < 0)
    throw std::invalid_argument("phi: mu is negative at a sample point (H2 violated)");
  return d;
}

LData make_L_data(const Mesh& mesh, const ScalarField& alpha, const ScalarField& gamma,
                  const ScalarField& r) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  LData d;
  d.mesh = &mesh;
  d.alpha = sample_field(mesh, rule, alpha);
  d.gamma = sample_field(mesh, rule, gamma);
  d.r = sample_field(mesh, rule, r);
  d.identically_zero = (d.alpha.minv == 0 && d.alpha.maxv == 0);
  return d;
}

PsiData make_psi_data(const Mesh& mesh, const NonlinearitySpec& spec) {
  const QuadratureRule& rule = QuadratureRule::three_point();
  PsiData d;
  d.mesh = &mesh;
  d.spec = &spec;
  d.s = sample_field(mesh, rule, spec.s);
  if (spec.family == NonlinearitySpec::Family::Expression) d.xy = sample_points(mesh, rule);
  return d;
}

namespace {

inline double grad_norm(const Mesh& mesh, const std::vector<double>& u, int t, Vec2* dir) {
  const auto& tri = mesh.triangle(t);
  const auto& g = mesh.basis_gradients(t);
  Vec2 grad{0, 0};
  for (int k = 0; k < 3; ++k) {
    grad.x += u[tri.v[k]] * g[k].x;
    grad.y += u[tri.v[k]] * g[k].y;
  }
  if (dir) *dir = grad;
  return grad.norm();
}

inline double value_at(const Mesh& mesh, const std::vector<double>& u, int t,
                       const std::array<double, 3>& b) {
  const auto& tri = mesh.triangle(t);
  return b[0] * u[tri.v[0]] + b[1] * u[tri.v[1]] + b[2] * u[tri.v[2]];
}

}  // namespace

double phi_energy(const PhiData& d, const std::vector<double>& u) {
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double g = grad_norm(mesh, u, t, nullptr);
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double pe = d.p.at(t, k);
      double term = std::pow(g, pe) / pe;
      double m = d.mu.at(t, k);
      if (m != 0.0) {
        double qe = d.q.at(t, k);
        term += m * std::pow(g, qe) / qe;
      }
      cell += rule.weights[k] * term;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

void phi_grad_add(const PhiData& d, const std::vector<double>& u, double scale,
                  std::vector<double>& out) {
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    Vec2 grad;
    double g = grad_norm(mesh, u, t, &grad);
    if (g == 0.0) continue;  // flux vanishes in the limit for every p > 1
    Vec2 dir{grad.x / g, grad.y / g};
    double coef = 0;
    for (int k = 0; k < nqp; ++k) {
      double c = std::pow(g, d.p.at(t, k) - 1.0);
      double m = d.mu.at(t, k);
      if (m != 0.0) c += m * std::pow(g, d.q.at(t, k) - 1.0);
      coef += rule.weights[k] * c;
    }
    Vec2 flux{coef * dir.x, coef * dir.y};
    const auto& tri = mesh.triangle(t);
    const auto& bg = mesh.basis_gradients(t);
    double A = mesh.area(t) * scale;
    for (int k = 0; k < 3; ++k)
      out[tri.v[k]] += A * (flux.x * bg[k].x + flux.y * bg[k].y);
  }
}

double L_energy(const LData& d, const std::vector<double>& u) {
  if (d.identically_zero) return 0.0;
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double uv = std::fabs(value_at(mesh, u, t, rule.points[k]));
      double re = d.r.at(t, k);
      double well = std::pow(uv, re) / re - d.gamma.at(t, k);
      cell += rule.weights[k] * 0.5 * d.alpha.at(t, k) * well * well;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

void L_grad_add(const LData& d, const std::vector<double>& u, double scale,
                std::vector<double>& out) {
  if (d.identically_zero) return;
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    double A = mesh.area(t) * scale;
    for (int k = 0; k < nqp; ++k) {
      const auto& b = rule.points[k];
      double uv = value_at(mesh, u, t, b);
      if (uv == 0.0) continue;  // |u|^{r-2}u -> 0 since r > 1
      double re = d.r.at(t, k);
      double well = std::pow(std::fabs(uv), re) / re - d.gamma.at(t, k);
      double density = d.alpha.at(t, k) * well * signed_power(uv, re - 1.0);
      double w = rule.weights[k] * A * density;
      for (int j = 0; j < 3; ++j) out[tri.v[j]] += w * b[j];
    }
  }
}

double psi_energy(const PsiData& d, const std::vector<double>& u) {
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  const NonlinearitySpec& spec = *d.spec;
  const bool closed_form = spec.family == NonlinearitySpec::Family::PaperF1;
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double uv = value_at(mesh, u, t, rule.points[k]);
      double Fv;
      if (closed_form) {
        double sx = d.s.at(t, k);
        Fv = spec.c1 * uv + spec.c2 * std::pow(std::fabs(uv), sx) / sx;
      } else {
        Vec2 xy = d.xy[static_cast<std::size_t>(t) * nqp + k];
        Fv = spec.F(xy.x, xy.y, uv);
      }
      cell += rule.weights[k] * Fv;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

void psi_grad_add(const PsiData& d, const std::vector<double>& u, double scale,
                  std::vector<double>& out) {
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  const NonlinearitySpec& spec = *d.spec;
  const bool closed_form = spec.family == NonlinearitySpec::Family::PaperF1;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    double A = mesh.area(t) * scale;
    for (int k = 0; k < nqp; ++k) {
      const auto& b = rule.points[k];
      double uv = value_at(mesh, u, t, b);
      double fv;
      if (closed_form) {
        fv = spec.c1 + spec.c2 * signed_power(uv, d.s.at(t, k) - 1.0);
      } else {
        Vec2 xy = d.xy[static_cast<std::size_t>(t) * nqp + k];
        fv = spec.f(xy.x, xy.y, uv);
      }
      double w = rule.weights[k] * A * fv;
      for (int j = 0; j < 3; ++j) out[tri.v[j]] += w * b[j];
    }
  }
}

double gradient_modular(const PhiData& d, const std::vector<double>& u, double zeta) {
  const Mesh& mesh = *d.mesh;
  const QuadratureRule& rule = QuadratureRule::three_point();
  const int nqp = static_cast<int>(rule.points.size());
  double total = 0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double g = grad_norm(mesh, u, t, nullptr) / zeta;
    double cell = 0;
    for (int k = 0; k < nqp; ++k) {
      double term = std::pow(g, d.p.at(t, k));
      double m = d.mu.at(t, k);
      if (m != 0.0) term += m * std::pow(g, d.q.at(t, k));
      cell += rule.weights[k] * term;
    }
    total += mesh.area(t) * cell;
  }
  return total;
}

double w1h0_norm(const PhiData& d, const std::vector<double>& u) {
  return luxemburg_norm([&](double z) { return gradient_modular(d, u, z); });
}

}  // namespace detail

double energy_Phi(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                  const ScalarField& mu) {
  detail::PhiData d = detail::make_phi_data(u.mesh(), p, q, mu);
  return detail::phi_energy(d, u.values());
}

ResidualVector grad_Phi(const DiscreteFunction& u, const ScalarField& p, const ScalarField& q,
                        const ScalarField& mu) {
  detail::PhiData d = detail::make_phi_data(u.mesh(), p, q, mu);
  ResidualVector rv{&u.mesh(), std::vector<double>(u.size(), 0.0)};
  detail::phi_grad_add(d, u.values(), 1.0, rv.entries);
  rv.zero_boundary();
  return rv;
}

double energy_L(const DiscreteFunction& u, const ScalarField& alpha, const ScalarField& gamma,
                const ScalarField& r) {
  detail::LData d = detail::make_L_data(u.mesh(), alpha, gamma, r);
  return detail::L_energy(d, u.values());
}

ResidualVector grad_L(const DiscreteFunction& u, const ScalarField& alpha,
                      const ScalarField& gamma, const ScalarField& r) {
  detail::LData d = detail::make_L_data(u.mesh(), alpha, gamma, r);
  ResidualVector rv{&u.mesh(), std::vector<double>(u.size(), 0.0)};
  detail::L_grad_add(d, u.values(), 1.0, rv.entries);
  rv.zero_boundary();
  return rv;
}

double energy_L_bound(double embedding_constant, double alpha_sup, double r_minus,
                      double r_max, double norm_u) {
  return embedding_constant * alpha_sup / (r_minus * r_minus) *
         std::pow(norm_u, 2.0 * r_max);
}

double energy_Psi(const DiscreteFunction& u, const NonlinearitySpec& spec) {
  detail::PsiData d = detail::make_psi_data(u.mesh(), spec);
  return detail::psi_energy(d, u.values());
}

ResidualVector grad_Psi(const DiscreteFunction& u, const NonlinearitySpec& spec) {
  detail::PsiData d = detail::make_psi_data(u.mesh(), spec);
  ResidualVector rv{&u.mesh(), std::vector<double>(u.size(), 0.0)};
  detail::psi_grad_add(d, u.values(), 1.0, rv.entries);
  rv.zero_boundary();
  return rv;
}

ResidualVector apply_T(const DiscreteFunction& u, const FieldSet& fields) {
  detail::PhiData pd = detail::make_phi_data(u.mesh(), fields.p, fields.q, fields.mu);
  detail::LData ld = detail::make_L_data(u.mesh(), fields.alpha, fields.gamma, fields.r);
  ResidualVector rv{&u.mesh(), std::vector<double>(u.size(), 0.0)};
  detail::phi_grad_add(pd, u.values(), 1.0, rv.entries);
  detail::L_grad_add(ld, u.values(), 1.0, rv.entries);
  rv.zero_boundary();
  return rv;
}

namespace {

Vec2 power_map(Vec2 a, double e) {
  double n = a.norm();
  if (n == 0.0) return {0, 0};
  double m = std::pow(n, e - 1.0);
  return {a.x / n * m, a.y / n * m};
}

}  // namespace

double ineq_kernel_36(Vec2 a, Vec2 b, double m) {
  if (!(m > 1.0)) throw std::invalid_argument("ineq_kernel_36: m must exceed 1");
  Vec2 diff = a - b;
  double dn = diff.norm();
  if (dn == 0.0) return 0.0;
  double lhs = std::pow(2.0, m) * dn * std::pow(a.norm() + b.norm(), m - 2.0);
  double rhs = (power_map(a, m) - power_map(b, m)).norm();
  return lhs - rhs;
}

double ineq_kernel_37(Vec2 x, Vec2 y, double s) {
  if (!(s > 1.0)) throw std::invalid_argument("ineq_kernel_37: s must exceed 1");
  Vec2 diff = x - y;
  double dn = diff.norm();
  if (dn == 0.0) return 0.0;
  double lhs = (power_map(x, s) - power_map(y, s)).dot(diff);
  double rhs = std::pow(2.0, -s) * std::pow(dn, s);
  return lhs - rhs;
}

}  // namespace dphase
