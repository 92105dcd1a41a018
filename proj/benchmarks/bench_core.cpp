#include <benchmark/benchmark.h>

#include "jointsel/data.hpp"
#include "jointsel/penalty.hpp"
#include "jointsel/selection.hpp"
#include "jointsel/solver.hpp"
#include "jointsel/synthgen.hpp"

namespace {

using namespace jointsel;

SynthDraw make_draw(int p, int n) {
  SynthSpec spec;
  spec.p = p;
  spec.q = 2;
  spec.k = std::min(10, p);
  spec.n = n;
  spec.seed = 7;
  return generate(spec);
}

void BM_Generate(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) {
    SynthDraw draw = make_draw(p, n);
    benchmark::DoNotOptimize(draw.data.y.sum());
  }
}
BENCHMARK(BM_Generate)->Args({64, 1000})->Args({256, 4000});

void BM_ComputeMoments(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  SynthDraw draw = make_draw(p, n);
  CohortDataset cohorts = partition_by_treatment(draw.data);
  for (auto _ : state) {
    MomentCache cache = compute_moments(cohorts);
    benchmark::DoNotOptimize(cache.gram[0](0, 0));
  }
}
BENCHMARK(BM_ComputeMoments)->Args({64, 1000})->Args({256, 4000});

void BM_ProxRows(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  Matrix theta = Matrix::Constant(p, 4, 0.5);
  for (auto _ : state) {
    Matrix out = prox_l12(theta, 0.3);
    benchmark::DoNotOptimize(out(0, 0));
  }
}
BENCHMARK(BM_ProxRows)->Arg(128)->Arg(1024);

void BM_FitJoint(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  SynthDraw draw = make_draw(p, 2000);
  CohortDataset cohorts = partition_by_treatment(draw.data);
  MomentCache cache = compute_moments(cohorts);
  RegularizerSpec reg = RegularizerSpec::mcp(0.2);
  SolverConfig config;
  for (auto _ : state) {
    FitResult fr = fit_moments(cache, reg, config);
    benchmark::DoNotOptimize(fr.final_objective);
  }
}
BENCHMARK(BM_FitJoint)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
