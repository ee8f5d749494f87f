#include "dphase/operators.hpp"

#include "dphase/musielak.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dphase;

namespace {

ScalarField cf(double v, const char* label) { return ScalarField::constant(v, label); }

double pair_with(const ResidualVector& rv, const DiscreteFunction& v) {
  double acc = 0;
  for (int i = 0; i < v.size(); ++i) acc += rv.entries[i] * v[i];
  return acc;
}

// Central-difference oracle for <E'(u), v>.
template <typename Energy>
double central_diff(Energy&& E, const DiscreteFunction& u, const DiscreteFunction& v, double h) {
  DiscreteFunction up = u, um = u;
  for (int i = 0; i < u.size(); ++i) {
    up[i] += h * v[i];
    um[i] -= h * v[i];
  }
  return (E(up) - E(um)) / (2.0 * h);
}

double u_inf(const DiscreteFunction& u) {
  double m = 0;
  for (int i = 0; i < u.size(); ++i) m = std::max(m, std::fabs(u[i]));
  return m;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("Phi vanishes only at zero") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  DiscreteFunction z(m);
  CHECK(energy_Phi(z, cf(2.5, "p"), cf(2.8, "q"), cf(1, "mu")) == 0.0);
  std::mt19937_64 eng(2);
  DiscreteFunction u = testsupport::random_w0(m, eng, 1.0);
  CHECK(energy_Phi(u, cf(2.5, "p"), cf(2.8, "q"), cf(1, "mu")) > 0.0);
}

TEST_CASE("Phi of the linear ramp") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  DiscreteFunction u = DiscreteFunction::interpolate(m, [](double x, double) { return x; });
  double expected = 1.0 / 2.5 + 1.0 / 2.8;
  CHECK(energy_Phi(u, cf(2.5, "p"), cf(2.8, "q"), cf(1, "mu")) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Phi sandwich against the gradient norm above one") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 6, 6);
  std::mt19937_64 eng(9);
  ScalarField p = cf(2.5, "p"), q = cf(2.8, "q"), mu = cf(1, "mu");
  int above = 0;
  for (int k = 0; k < 12; ++k) {
    DiscreteFunction u = testsupport::random_w0(m, eng, 5.0);
    double gn = norm_W1H0(u, p, q, mu);
    if (gn <= 1.0 + 1e-9) continue;
    ++above;
    double phi = energy_Phi(u, p, q, mu);
    CHECK(phi >= std::pow(gn, 2.5) / 2.8 - 1e-9);
    CHECK(phi <= std::pow(gn, 2.8) / 2.5 + 1e-9);
  }
  CHECK(above > 3);
}

TEST_CASE("grad Phi vanishes at zero and matches central differences") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  ScalarField p = ScalarField::parse("2.3 + 0.1*sin(x)", "p");
  ScalarField q = ScalarField::parse("2.7 + 0.1*cos(y)", "q");
  ScalarField mu = ScalarField::parse("0.5 + 0.25*x", "mu");

  DiscreteFunction z(m);
  ResidualVector rz = grad_Phi(z, p, q, mu);
  CHECK(rz.inf_norm_free() == 0.0);

  std::mt19937_64 eng(31);
  auto E = [&](const DiscreteFunction& w) { return energy_Phi(w, p, q, mu); };
  for (int k = 0; k < 20; ++k) {
    DiscreteFunction u = testsupport::random_w0(m, eng, 1.5);
    DiscreteFunction v = testsupport::random_w0(m, eng, 1.0);
    double h = 1e-6 * (1.0 + u_inf(u));
    double lhs = pair_with(grad_Phi(u, p, q, mu), v);
    double rhs = central_diff(E, u, v, h);
    CHECK(std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)) < 1e-5);
  }
}

TEST_CASE("grad Phi at p=q=2 is the classical stiffness action") {
  // Hand-assembled oracle on the two-triangle unit square: with the
  // diagonal (0,0)-(1,1), both stiffness blocks are the standard
  // [1, -1/2, -1/2; ...] pattern.
  Mesh m = Mesh::rect(0, 0, 1, 1, 1, 1);
  auto K = testsupport::dense_stiffness(m);
  CHECK(K[0][0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(K[3][3] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(K[1][1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(K[0][1] == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(K[2][3] == doctest::Approx(-0.5).epsilon(1e-13));
  // Across the diagonal the couplings cancel: the classical 5-point stencil.
  CHECK(K[0][3] == doctest::Approx(0.0).scale(1).epsilon(1e-13));
  CHECK(K[1][2] == doctest::Approx(0.0).scale(1).epsilon(1e-13));

  Mesh m2 = Mesh::rect(0, 0, 1, 1, 3, 3);
  auto K2 = testsupport::dense_stiffness(m2);
  std::mt19937_64 eng(8);
  for (int rep = 0; rep < 5; ++rep) {
    DiscreteFunction u = testsupport::random_w0(m2, eng, 2.0);
    ResidualVector rv = grad_Phi(u, cf(2, "p"), cf(2, "q"), cf(0, "mu"));
    for (int i = 0; i < m2.vertex_count(); ++i) {
      if (m2.on_boundary(i)) continue;
      double row = 0;
      for (int j = 0; j < m2.vertex_count(); ++j) row += K2[i][j] * u[j];
      CHECK(rv.entries[i] == doctest::Approx(row).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate flux at a flat element is zero for p < 2") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 2, 2);
  DiscreteFunction z(m);
  ResidualVector rv = grad_Phi(z, cf(1.5, "p"), cf(2.5, "q"), cf(1, "mu"));
  for (double e : rv.entries) CHECK(e == 0.0);
}

TEST_CASE("double-well energy values") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  DiscreteFunction z(m);
  CHECK(energy_L(z, cf(1, "alpha"), cf(1, "gamma"), cf(2, "r")) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // The well's zero set: u = (r gamma)^{1/r} constant.
  DiscreteFunction w =
      DiscreteFunction::interpolate(m, [](double, double) { return std::sqrt(2.0); });
  CHECK(energy_L(w, cf(1, "alpha"), cf(1, "gamma"), cf(2, "r")) ==
        doctest::Approx(0.0).scale(1).epsilon(1e-12));

  DiscreteFunction one = DiscreteFunction::interpolate(m, [](double, double) { return 1.0; });
  CHECK(energy_L(one, cf(2, "alpha"), cf(1, "gamma"), cf(2, "r")) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("grad L matches central differences and an independent assembly") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  ScalarField alpha = cf(1, "alpha"), gamma = cf(1, "gamma"), r = cf(2, "r");

  DiscreteFunction z(m);
  CHECK(grad_L(z, alpha, gamma, r).inf_norm_free() == 0.0);

  std::mt19937_64 eng(12);
  auto E = [&](const DiscreteFunction& w) { return energy_L(w, alpha, gamma, r); };
  for (int k = 0; k < 20; ++k) {
    DiscreteFunction u = testsupport::random_w0(m, eng, 2.0);
    DiscreteFunction v = testsupport::random_w0(m, eng, 1.0);
    double h = 1e-6 * (1.0 + u_inf(u));
    double lhs = pair_with(grad_L(u, alpha, gamma, r), v);
    double rhs = central_diff(E, u, v, h);
    CHECK(std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)) < 1e-5);
  }

  // Second, direct assembly of ∫ (u^2/2 - 1) u phi_i with the same rule.
  DiscreteFunction u = testsupport::random_w0(m, eng, 1.5);
  ResidualVector rv = grad_L(u, alpha, gamma, r);
  const QuadratureRule& rule = QuadratureRule::three_point();
  std::vector<double> direct(m.vertex_count(), 0.0);
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangle(t);
    for (std::size_t kq = 0; kq < rule.points.size(); ++kq) {
      const auto& b = rule.points[kq];
      double uv = u.value_at(t, b);
      double density = (uv * uv / 2.0 - 1.0) * uv;
      for (int j = 0; j < 3; ++j)
        direct[tri.v[j]] += m.area(t) * rule.weights[kq] * density * b[j];
    }
  }
  for (int i = 0; i < m.vertex_count(); ++i) {
    if (m.on_boundary(i)) continue;
    CHECK(rv.entries[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  }
}

TEST_CASE("Psi closed form and gradient") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  NonlinearitySpec lin = NonlinearitySpec::paper_f1(1.0, 0.0, cf(1.8, "s"));
  DiscreteFunction z(m);
  CHECK(energy_Psi(z, lin) == 0.0);
  CHECK(grad_Psi(z, lin).inf_norm_free() > 0.0);  // f(x,0) = c1

  // c2 = 0 makes Psi(u) the plain integral of u.
  DiscreteFunction u = DiscreteFunction::interpolate(m, [](double x, double y) { return x + y; });
  double direct = integrate(m, [&](Vec2 p, int) { return p.x + p.y; },
                            QuadratureRule::three_point());
  CHECK(energy_Psi(u, lin) == doctest::Approx(direct).epsilon(1e-12));

  NonlinearitySpec full = NonlinearitySpec::paper_f1(1.0, 2.0, cf(1.8, "s"));
  std::mt19937_64 eng(77);
  auto E = [&](const DiscreteFunction& w) { return energy_Psi(w, full); };
  for (int k = 0; k < 20; ++k) {
    DiscreteFunction a = testsupport::random_w0(m, eng, 2.0);
    DiscreteFunction v = testsupport::random_w0(m, eng, 1.0);
    double h = 1e-6 * (1.0 + u_inf(a));
    double lhs = pair_with(grad_Psi(a, full), v);
    double rhs = central_diff(E, a, v, h);
    CHECK(std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)) < 1e-5);
  }
}

TEST_CASE("expression nonlinearity integrates F by quadrature") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 2, 2);
  // f(x,t) = cos(t): F(x,t) = sin(t), checked through Psi of a constant.
  NonlinearitySpec spec =
      NonlinearitySpec::expression(Expr::parse("cos(t)"), cf(1.8, "s"), 1.0, 0.0);
  CHECK(spec.F(0.3, 0.4, 1.25) == doctest::Approx(std::sin(1.25)).epsilon(1e-9));
  CHECK(spec.F(0.3, 0.4, -1.25) == doctest::Approx(std::sin(-1.25)).epsilon(1e-9));
  DiscreteFunction c =
      DiscreteFunction::interpolate(m, [](double, double) { return 0.75; });
  CHECK(energy_Psi(c, spec) == doctest::Approx(std::sin(0.75)).epsilon(1e-9));
}

TEST_CASE("apply_T composes the two gradients") {
  Mesh m = Mesh::rect(0, 0, 1, 1, 4, 4);
  FieldSet fields;
  fields.p = cf(2.5, "p");
  fields.q = cf(2.8, "q");
  fields.mu = cf(1, "mu");
  fields.alpha = cf(1, "alpha");
  fields.gamma = cf(1, "gamma");
  fields.r = cf(2, "r");

  DiscreteFunction z(m);
  CHECK(apply_T(z, fields).inf_norm_free() == 0.0);

  std::mt19937_64 eng(4);
  DiscreteFunction u = testsupport::random_w0(m, eng, 1.0);
  ResidualVector t = apply_T(u, fields);
  ResidualVector a = grad_Phi(u, fields.p, fields.q, fields.mu);
  ResidualVector b = grad_L(u, fields.alpha, fields.gamma, fields.r);
  for (int i = 0; i < m.vertex_count(); ++i)
    CHECK(t.entries[i] == doctest::Approx(a.entries[i] + b.entries[i]).epsilon(1e-13));

  // mu = 0, alpha = 0 degenerates T to the pure p(x)-Laplacian residual.
  FieldSet plap = fields;
  plap.mu = cf(0, "mu");
  plap.alpha = cf(0, "alpha");
  ResidualVector tp = apply_T(u, plap);
  ResidualVector gp = grad_Phi(u, plap.p, plap.q, plap.mu);
  for (int i = 0; i < m.vertex_count(); ++i) CHECK(tp.entries[i] == gp.entries[i]);
}

TEST_CASE("inequality kernel (3.6)") {
  CHECK(ineq_kernel_36({1, 0}, {0, 0}, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ineq_kernel_36({0.3, -0.4}, {0.3, -0.4}, 2.5) == 0.0);
  std::mt19937_64 eng(100);
  for (double mval : {1.5, 2.0, 2.5, 2.8}) {
    double worst = 1e300;
    for (int k = 0; k < 100000; ++k) {
      Vec2 a{4 * testsupport::uniform01(eng) - 2, 4 * testsupport::uniform01(eng) - 2};
      Vec2 b{4 * testsupport::uniform01(eng) - 2, 4 * testsupport::uniform01(eng) - 2};
      worst = std::min(worst, ineq_kernel_36(a, b, mval));
    }
    INFO("m = ", mval, " worst slack = ", worst);
    CHECK(worst >= -1e-12);
  }
}

TEST_CASE("inequality kernel (3.7)") {
  CHECK(ineq_kernel_37({1, 0}, {-1, 0}, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ineq_kernel_37({0.7, 0.1}, {0.7, 0.1}, 2.5) == 0.0);
  std::mt19937_64 eng(200);
  for (double sval : {2.0, 2.5, 2.8}) {
    double worst = 1e300;
    for (int k = 0; k < 100000; ++k) {
      Vec2 x{4 * testsupport::uniform01(eng) - 2, 4 * testsupport::uniform01(eng) - 2};
      Vec2 y{4 * testsupport::uniform01(eng) - 2, 4 * testsupport::uniform01(eng) - 2};
      worst = std::min(worst, ineq_kernel_37(x, y, sval));
    }
    INFO("s = ", sval, " worst slack = ", worst);
    CHECK(worst >= -1e-12);
  }
}

TEST_CASE("the (3.7) bound genuinely fails below s = 2") {
  // Nearby vectors of moderate norm break the bound for s < 2, which is
  // why the sweeps stay at s >= 2.
  CHECK(ineq_kernel_37({1, 0}, {0.99, 0}, 1.5) < 0.0);
}

}  // TEST_SUITE
