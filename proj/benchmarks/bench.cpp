#include <benchmark/benchmark.h>

#include "nlslab/normalize.hpp"
#include "nlslab/ode.hpp"
#include "nlslab/pde.hpp"
#include "support.hpp"

using namespace nlslab;
using namespace nlslab::testing;

static void BM_EigenDecompose(benchmark::State& state) {
  const SystemRep s = system_b();
  for (auto _ : state) benchmark::DoNotOptimize(eigen_decompose(s));
}
BENCHMARK(BM_EigenDecompose);

static void BM_Classify(benchmark::State& state) {
  const SystemRep s = system_a(2);
  for (auto _ : state) benchmark::DoNotOptimize(classify(s));
}
BENCHMARK(BM_Classify);

static void BM_NormalizeDisguisedA22(benchmark::State& state) {
  Rng r(1);
  const SystemRep s =
      transform_system(from_template(FormTag::A22, random_params(FormTag::A22, r)), random_gl2(r, 0));
  for (auto _ : state) benchmark::DoNotOptimize(normalize(s));
}
BENCHMARK(BM_NormalizeDisguisedA22);

static void BM_Integrate(benchmark::State& state) {
  const SystemRep s = system_a(0.5);
  IntegrateOptions o;
  o.diagnostics = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate(s, {0.6, cplx(0, 0.8)}, {0, static_cast<double>(state.range(0))}, 1e-10, o));
}
BENCHMARK(BM_Integrate)->Arg(100)->Arg(1000);

static void BM_PdeStep(benchmark::State& state) {
  Grid g;
  g.N = static_cast<int>(state.range(0));
  PdeState st;
  st.grid = g;
  for (int n = 0; n < g.N; ++n) {
    st.u1.push_back(0.1 * std::exp(-g.x(n) * g.x(n) / 2));
    st.u2.push_back(0.08 * std::exp(-(g.x(n) - 1) * (g.x(n) - 1) / 2));
  }
  const SystemRep s = system_b();
  for (auto _ : state) st = step(s, st, 0.05);
}
BENCHMARK(BM_PdeStep)->Arg(1024)->Arg(4096);
BENCHMARK_MAIN();
