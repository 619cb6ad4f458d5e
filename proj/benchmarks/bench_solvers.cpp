// Microbenchmarks for the solver hot paths. Run with OPENBLAS_NUM_THREADS=1
// for stable numbers; the harness parallelizes at trial level anyway.

#include <benchmark/benchmark.h>

#include "sblkit/amp.hpp"
#include "sblkit/denoise.hpp"
#include "sblkit/oracle.hpp"
#include "sblkit/problem.hpp"
#include "sblkit/rng.hpp"
#include "sblkit/sbl.hpp"
#include "sblkit/transform.hpp"
#include "sblkit/utamp.hpp"

using namespace sblkit;

namespace {

SparseProblem desk_problem(std::uint64_t seed) {
  return make_problem({400, 500, IllConditioned{100.0}}, 0.1, 1.0, 60.0, seed);
}

void BM_GenMatrixIllConditioned(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_matrix({400, 500, IllConditioned{100.0}}, seed++));
  }
}
BENCHMARK(BM_GenMatrixIllConditioned)->Unit(benchmark::kMillisecond);

void BM_UnitaryTransform(benchmark::State& state) {
  const SparseProblem p = desk_problem(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(unitary_transform(p.a, p.y));
  }
}
BENCHMARK(BM_UnitaryTransform)->Unit(benchmark::kMillisecond);

void BM_BgDenoise(benchmark::State& state) {
  Rng rng(3);
  Vector q(500);
  for (Index i = 0; i < q.size(); ++i) q[i] = 3.0 * rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bg_denoise(q, 0.01, 0.1, 1.0));
  }
}
BENCHMARK(BM_BgDenoise);

void BM_UtampSblRun(benchmark::State& state) {
  const SparseProblem p = desk_problem(4);
  const TransformedModel tm = unitary_transform(p.a, p.y);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sbl_run(tm));
  }
}
BENCHMARK(BM_UtampSblRun)->Unit(benchmark::kMillisecond);

void BM_AmpRunBudget300(benchmark::State& state) {
  const SparseProblem p = desk_problem(5);
  AmpOptions opts;
  opts.tol = 0.0;
  opts.halt_on_divergence = false;
  const DenoiserSpec prior = BernoulliGaussianPrior{0.1, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(amp_run(p.a, p.y, prior, p.lambda_true, opts));
  }
}
BENCHMARK(BM_AmpRunBudget300)->Unit(benchmark::kMillisecond);

void BM_OracleMmse(benchmark::State& state) {
  const SparseProblem p = desk_problem(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_mmse(p.a, p.y, p.signal.support, p.lambda_true,
                                         p.signal.sigma2_x));
  }
}
BENCHMARK(BM_OracleMmse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
