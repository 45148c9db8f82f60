// Serial reference vs OpenMP kernels for the nonlinearity.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "hfscat/nonlinearity.hpp"

using namespace hfscat;

namespace {

OrbitalEnsemble ensemble(std::size_t n, std::size_t k) {
  const GridPtr g = Grid::make(n, static_cast<double>(n) / 8.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w;
  std::vector<ComplexField> orb;
  for (std::size_t m = 0; m < k; ++m) {
    ComplexField f(g);
    const double x0 = 4.0 * u(rng), xi0 = u(rng);
    for (std::size_t j = 0; j < n; ++j) {
      const double z = g->x(j) - x0;
      f[j] = std::exp(-0.5 * z * z) * std::polar(1.0, xi0 * g->x(j));
    }
    w.push_back(1.0 / static_cast<double>(m + 1));
    orb.push_back(std::move(f));
  }
  return OrbitalEnsemble(std::move(w), std::move(orb), 1.0);
}

const Potential potential = Potential::gaussian(1.0, 1.0);

void args(benchmark::internal::Benchmark* b) {
  for (long n : {1024L, 16384L})
    for (long k : {2L, 8L}) b->Args({n, k});
}

void BM_exchange_reference(benchmark::State& st) {
  const auto e = ensemble(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::exchange_term(e, potential));
}

void BM_exchange_parallel(benchmark::State& st) {
  const auto e = ensemble(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(exchange_term(e, potential));
}

// Fused operator reused across calls, as the stepper does.
void BM_rhs_operator(benchmark::State& st) {
  const auto e = ensemble(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  NonlinearOperator op(e.grid(), potential, RhsMode::HartreeFock);
  OrbitalValues u, out;
  for (const auto& f : e.orbitals()) u.emplace_back(f.values().begin(), f.values().end());
  for (auto _ : st) {
    op.apply(e.weights(), u, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_exchange_dense_oracle(benchmark::State& st) {
  const auto e = ensemble(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(exchange_dense_oracle(e, potential));
}

}  // namespace

BENCHMARK(BM_exchange_reference)->Apply(args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_exchange_parallel)->Apply(args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_rhs_operator)->Apply(args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_exchange_dense_oracle)->Args({256, 2})->Args({512, 8})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
