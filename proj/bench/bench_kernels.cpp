// Serial reference pass against the OpenMP pass on the same request.

#include <benchmark/benchmark.h>

#include "spcap/operator.hpp"

using namespace spcap;

namespace {

struct Fixture {
  CantorTree tree;
  BoxFieldEvaluator eval;
  BoxSet leaves;
  PassRequest req;

  Fixture(int n, int k)
      : tree(CantorTree::build_constant(params(n), 0.3, k)), eval(n, 1.0), leaves(BoxSet::leaves(tree)) {
    req.eval = &eval;
    req.targets = &leaves;
    req.sources = &leaves;
  }

  static SParams params(int n) {
    SParams p;
    p.n = n;
    p.d = 2;
    p.tau0 = default_tau0(2);
    return p;
  }
};

void BM_PassSerial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(run_pass_serial(f.req).l2.data());
  state.counters["cubes"] = static_cast<double>(f.leaves.size());
}

void BM_PassParallel(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const int workers = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(run_pass_parallel(f.req, workers).l2.data());
  state.counters["cubes"] = static_cast<double>(f.leaves.size());
  state.counters["workers"] = workers;
}

void BM_GramParallel(benchmark::State& state) {
  Fixture f(1, static_cast<int>(state.range(0)));
  f.req.want_gram = true;
  for (auto _ : state) benchmark::DoNotOptimize(run_pass_parallel(f.req, static_cast<int>(state.range(1))).gram.data());
}

}  // namespace

BENCHMARK(BM_PassSerial)->Args({1, 2})->Args({1, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PassParallel)
    ->Args({1, 2, 1})->Args({1, 2, 4})
    ->Args({1, 3, 1})->Args({1, 3, 4})
    ->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Args({2, 1})->Args({2, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
