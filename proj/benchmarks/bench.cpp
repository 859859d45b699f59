// Microbenchmarks for the hot numerical kernels: the shifted Sylvester solve
// behind P_lambda, one defect-iteration step, the matrix exponential, and the
// transport-model certificate pencil.

#include "minqds/criteria.hpp"
#include "minqds/models.hpp"
#include "minqds/resolvent.hpp"
#include "minqds/timedomain.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace minqds;

namespace {

GKSLModel random_model(int dim) {
  std::mt19937_64 rng(1234 + dim);
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(double(dim)));
  auto rand_mat = [&](double scale) {
    ComplexMatrix A(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) A(i, j) = scale * Complex(g(rng), g(rng));
    }
    return A;
  };
  GKSLModel m;
  m.Ls = {rand_mat(1.0), rand_mat(1.0)};
  ComplexMatrix M = ComplexMatrix::Zero(dim, dim);
  for (const auto& L : m.Ls) M += L.adjoint() * L;
  const ComplexMatrix H = hermitian_part(rand_mat(1.0));
  m.G = Complex(0, -1) * H - 0.5 * hermitian_part(M);
  return m;
}

void BM_shifted_sylvester(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const GKSLModel m = random_model(dim);
  ResolventEngine eng(m);
  const ComplexMatrix I = ComplexMatrix::Identity(dim, dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eng.p_lambda(1.0, I));
  }
}
BENCHMARK(BM_shifted_sylvester)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

void BM_defect_step(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const GKSLModel m = random_model(dim);
  ResolventEngine eng(m);
  ComplexMatrix T = ComplexMatrix::Identity(dim, dim);
  for (auto _ : state) {
    T = eng.q_lambda(1.0, T);
    benchmark::DoNotOptimize(T);
  }
}
BENCHMARK(BM_defect_step)->Arg(16)->Arg(64)->Arg(128);

void BM_matrix_exp(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const GKSLModel m = random_model(dim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_exp(m.G));
  }
}
BENCHMARK(BM_matrix_exp)->Arg(16)->Arg(64)->Arg(128);

void BM_transport_pencil(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  HalfLineGrid grid{n, 20.0};
  const ModelBundle b = build_transport_jump(
      [](double x) { return std::sqrt(2.0) * std::exp(-x); }, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_b(b.model, b.reference, b.b_constraints));
  }
}
BENCHMARK(BM_transport_pencil)->Arg(64)->Arg(128);

void BM_evolve_grid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  HalfLineGrid grid{n, 20.0};
  const ModelBundle b = build_transport_jump(
      [](double x) { return std::sqrt(2.0) * std::exp(-x); }, grid);
  Evolver ev(b.model);
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.at(I, 0.5));
  }
}
BENCHMARK(BM_evolve_grid)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
