// Shared test-side helpers: deterministic random fields, an independent
// dense stiffness assembly, and Gaussian elimination for the linear oracle.
#pragma once

#include "dphase/mesh.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace testsupport {

inline double uniform01(std::mt19937_64& eng) { return (eng() >> 11) * 0x1.0p-53; }

inline dphase::DiscreteFunction random_w0(const dphase::Mesh& mesh, std::mt19937_64& eng,
                                          double scale) {
  dphase::DiscreteFunction u(mesh);
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (!mesh.on_boundary(i)) u[i] = scale * (2.0 * uniform01(eng) - 1.0);
  return u;
}

// Classical P1 stiffness matrix (dense), assembled directly from the
// element geometry: K_ij = sum_T area * grad(phi_i) . grad(phi_j).
inline std::vector<std::vector<double>> dense_stiffness(const dphase::Mesh& mesh) {
  int n = mesh.vertex_count();
  std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto& g = mesh.basis_gradients(t);
    double A = mesh.area(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        K[tri.v[a]][tri.v[b]] += A * (g[a].x * g[b].x + g[a].y * g[b].y);
  }
  return K;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-14) throw std::runtime_error("singular system");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
  }
  return x;
}

// Solve the Dirichlet Poisson system K u = f on the free vertices.
inline dphase::DiscreteFunction poisson_dense(const dphase::Mesh& mesh,
                                              const std::vector<double>& fvec) {
  auto K = dense_stiffness(mesh);
  std::vector<int> free = mesh.free_vertices();
  const int n = static_cast<int>(free.size());
  std::vector<std::vector<double>> Kf(n, std::vector<double>(n));
  std::vector<double> bf(n);
  for (int a = 0; a < n; ++a) {
    bf[a] = fvec[free[a]];
    for (int b = 0; b < n; ++b) Kf[a][b] = K[free[a]][free[b]];
  }
  std::vector<double> x = dense_solve(std::move(Kf), std::move(bf));
  dphase::DiscreteFunction u(mesh);
  for (int a = 0; a < n; ++a) u[free[a]] = x[a];
  return u;
}

}  // namespace testsupport
