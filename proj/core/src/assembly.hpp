// Internal: cached element-loop kernels for the energies and their nodal
// gradients.  Every function below uses the 3-point rule so that field
// variation and |u|-nonlinear integrands are integrated consistently.
#pragma once

#include "dphase/mesh.hpp"
#include "dphase/operators.hpp"
#include "qpcache.hpp"

#include <cmath>
#include <vector>

namespace dphase::detail {

struct PhiData {
  const Mesh* mesh = nullptr;
  QpCache p, q, mu;
};

struct LData {
  const Mesh* mesh = nullptr;
  QpCache alpha, gamma, r;
  bool identically_zero = false;  // alpha == 0 everywhere
};

struct PsiData {
  const Mesh* mesh = nullptr;
  const NonlinearitySpec* spec = nullptr;
  QpCache s;
  std::vector<Vec2> xy;  // quadrature points (Expression family)
};

PhiData make_phi_data(const Mesh& mesh, const ScalarField& p, const ScalarField& q,
                      const ScalarField& mu);
LData make_L_data(const Mesh& mesh, const ScalarField& alpha, const ScalarField& gamma,
                  const ScalarField& r);
PsiData make_psi_data(const Mesh& mesh, const NonlinearitySpec& spec);

double phi_energy(const PhiData& d, const std::vector<double>& u);
double L_energy(const LData& d, const std::vector<double>& u);
double psi_energy(const PsiData& d, const std::vector<double>& u);

// Gradients accumulate scale * dE into out (size = vertex count).
void phi_grad_add(const PhiData& d, const std::vector<double>& u, double scale,
                  std::vector<double>& out);
void L_grad_add(const LData& d, const std::vector<double>& u, double scale,
                std::vector<double>& out);
void psi_grad_add(const PsiData& d, const std::vector<double>& u, double scale,
                  std::vector<double>& out);

// Scaled gradient-mode modular sum(A ((g/z)^p + mu (g/z)^q)) for the
// ||.||_{1,H,0} norm of coefficient vectors.
double gradient_modular(const PhiData& d, const std::vector<double>& u, double zeta);
double w1h0_norm(const PhiData& d, const std::vector<double>& u);

}  // namespace dphase::detail
