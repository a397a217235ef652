// OpenMP kernels against the serial reference implementations.

#include <benchmark/benchmark.h>

#include "kcgof/problems.hpp"
#include "kcgof/resampling.hpp"
#include "kcgof/stein.hpp"
#include "reference.hpp"

using namespace kcgof;

namespace {

struct Fixture {
  ProblemSpec problem;
  JointSample sample;
  GaussKernel k;
  GaussKernel l;
};

Fixture make(Index n) {
  auto [problem, sample] = make_problem("hgm", n, 1);
  const GaussKernel k(median_heuristic(sample.xs())), l(median_heuristic(sample.ys()));
  return {std::move(problem), std::move(sample), k, l};
}

void BM_GramParallel(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gram_H(f.problem.model, f.k, f.l, f.sample));
}

void BM_GramReference(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::gram_H(f.problem.model, f.k, f.l, f.sample));
}

void BM_KcsdParallel(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kcsd_estimate(gram_H(f.problem.model, f.k, f.l, f.sample)));
  }
}

void BM_KcsdReference(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reference::kcsd_estimate(f.problem.model, f.k, f.l, f.sample));
}

void BM_BootstrapParallel(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  const GramH g = gram_H(f.problem.model, f.k, f.l, f.sample);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_replicates(g, 50, 7));
}

void BM_BootstrapReference(benchmark::State& state) {
  const Fixture f = make(state.range(0));
  const GramH g = gram_H(f.problem.model, f.k, f.l, f.sample);
  Rng rng(7);
  for (auto _ : state) {
    for (int b = 0; b < 50; ++b) {
      const auto w = draw_multinomial_weights(g.size(), rng);
      benchmark::DoNotOptimize(reference::bootstrap_replicate(g.h, w));
    }
  }
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramReference)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KcsdParallel)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KcsdReference)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapReference)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
