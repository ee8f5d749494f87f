#include "dphase/analysis.hpp"
#include "dphase/musielak.hpp"
#include "dphase/nonvar.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace dphase;

namespace {

ScalarField cf(double v, const char* label) { return ScalarField::constant(v, label); }

DiscreteFunction random_field(const Mesh& mesh, unsigned seed) {
  std::mt19937_64 eng(seed);
  DiscreteFunction u(mesh);
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (!mesh.on_boundary(i)) u[i] = 2.0 * ((eng() >> 11) * 0x1.0p-53) - 1.0;
  return u;
}

void BM_ExprEval(benchmark::State& state) {
  Expr e = Expr::parse("2.5 + 0.1*sin(x)*cos(y) - x*y/4");
  double x = 0.3, y = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(x, y));
    x += 1e-9;
  }
}
BENCHMARK(BM_ExprEval);

void BM_RectMesh(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Mesh m = Mesh::rect(0, 0, 1, 1, n, n);
    benchmark::DoNotOptimize(m.triangle_count());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n * n);
}
BENCHMARK(BM_RectMesh)->Arg(16)->Arg(64);

void BM_ModularH(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Mesh m = Mesh::rect(0, 0, 1, 1, n, n);
  DiscreteFunction u = random_field(m, 42);
  ScalarField p = cf(2.5, "p"), q = cf(2.8, "q"), mu = cf(1, "mu");
  for (auto _ : state) benchmark::DoNotOptimize(modular_H(u, p, q, mu));
  state.SetItemsProcessed(state.iterations() * m.triangle_count());
}
BENCHMARK(BM_ModularH)->Arg(16)->Arg(32);

void BM_LuxemburgNorm(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Mesh m = Mesh::rect(0, 0, 1, 1, n, n);
  DiscreteFunction u = random_field(m, 7);
  ScalarField p = cf(2.5, "p"), q = cf(2.8, "q"), mu = cf(1, "mu");
  for (auto _ : state) benchmark::DoNotOptimize(norm_H(u, p, q, mu));
}
BENCHMARK(BM_LuxemburgNorm)->Arg(16)->Arg(32);

void BM_GradPhi(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Mesh m = Mesh::rect(0, 0, 1, 1, n, n);
  DiscreteFunction u = random_field(m, 3);
  ScalarField p = cf(2.5, "p"), q = cf(2.8, "q"), mu = cf(1, "mu");
  for (auto _ : state) {
    ResidualVector rv = grad_Phi(u, p, q, mu);
    benchmark::DoNotOptimize(rv.entries.data());
  }
  state.SetItemsProcessed(state.iterations() * m.triangle_count());
}
BENCHMARK(BM_GradPhi)->Arg(16)->Arg(32);

void BM_SolveMonotone(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Mesh m = Mesh::rect(0, 0, 1, 1, n, n);
  FieldSet f;
  f.p = cf(2.5, "p");
  f.q = cf(2.8, "q");
  f.mu = cf(1, "mu");
  f.alpha = cf(1, "alpha");
  f.gamma = cf(1, "gamma");
  f.r = cf(2, "r");
  RhsSpec rhs;
  rhs.g = cf(1, "g");
  std::vector<double> fvec = assemble_rhs(m, rhs);
  for (auto _ : state) {
    DiscreteFunction u = solve_monotone(fvec, m, f);
    benchmark::DoNotOptimize(u.values().data());
  }
}
BENCHMARK(BM_SolveMonotone)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EmbeddingEstimate(benchmark::State& state) {
  Mesh m = Mesh::rect(0, 0, 1, 1, 16, 16);
  ScalarField h = cf(2, "h"), p = cf(2, "p"), q = cf(3, "q"), mu = cf(0, "mu");
  for (auto _ : state) {
    EmbeddingEstimate est = estimate_embedding_constant(m, h, p, q, mu, 8, 42);
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_EmbeddingEstimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
