#include <benchmark/benchmark.h>

#include "bnmf/bnmf.hpp"

namespace {

bnmf::InteractionMatrix random_graph_matrix(std::size_t n, double k_mean) {
  bnmf::NgParams p;
  p.n = n;
  p.c = 1;
  p.k_mean = k_mean;
  p.k_out = 0.0;
  return bnmf::build_interaction_matrix(bnmf::generate_ng_graph(p, 7).graph);
}

// One H, W, beta sweep plus the energy evaluation, at fixed N and varying K.
void BM_FitIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const bnmf::InteractionMatrix v = random_graph_matrix(n, 16.0);
  bnmf::SolverConfig cfg;
  cfg.k_max = k;
  cfg.max_iters = 1;
  cfg.tol = 1e-300;
  const bnmf::Factorization init = bnmf::initialize(cfg, n);
  for (auto _ : state) {
    auto result = bnmf::fit(v, cfg, init);
    benchmark::DoNotOptimize(result.energy_trace.back());
  }
  state.SetComplexityN(state.range(1));
}
BENCHMARK(BM_FitIteration)
    ->Args({512, 16})
    ->Args({512, 32})
    ->Args({512, 64})
    ->Args({512, 128})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oN);

void BM_Energy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bnmf::InteractionMatrix v = random_graph_matrix(n, 16.0);
  bnmf::SolverConfig cfg;
  const bnmf::Factorization f = bnmf::initialize(cfg, n);
  for (auto _ : state) benchmark::DoNotOptimize(bnmf::energy(v, f, cfg));
}
BENCHMARK(BM_Energy)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Modularity(benchmark::State& state) {
  bnmf::NgParams p;
  const auto gen = bnmf::generate_ng_graph(p, 3);
  const auto part = bnmf::HardPartition::from_labels(gen.planted.labels);
  for (auto _ : state) benchmark::DoNotOptimize(bnmf::modularity(gen.graph, part));
}
BENCHMARK(BM_Modularity);

}  // namespace

BENCHMARK_MAIN();
