// Serial reference against the OpenMP version of each parallel kernel.
// Thread count follows COVERMECH_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "covermech/oracles.hpp"
#include "covermech/threshold.hpp"
#include "covermech/verify.hpp"

using namespace covermech;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

// Dense graph so neighbourhoods are large enough for the alpha scan to matter.
Graph dense_graph(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.emplace_back(u, v);
  return Graph(n, e);
}

void alpha_scan(benchmark::State& state) {
  const Graph g = dense_graph(60, 0.25, 1);
  const std::vector<double> x(g.num_nodes(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_Gx(g, x, exec_of(state)).value);
}
BENCHMARK(alpha_scan)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void facility_enumeration(benchmark::State& state) {
  const auto inst = generate_random_ufl(14, 20, 3, 5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ufl_exact(inst, exec_of(state)).cost());
}
BENCHMARK(facility_enumeration)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void wmon_probes(benchmark::State& state) {
  const VCAlgorithm alg = allocation_of([](const VCInstance& inst) {
    return run_any(ax_mechanism(inst.graph, std::vector<double>(inst.num_nodes(), 1.0)), inst);
  });
  const VCSampler sampler = [](std::mt19937_64& rng) { return generate_random_vc_instance(10, 0.35, 2, rng()); };
  WMONOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(wmon_check(alg, sampler, 2000, 1, opt).violations);
}
BENCHMARK(wmon_probes)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void truthfulness_grid(benchmark::State& state) {
  const VCMechanism mech = [](const VCInstance& inst) {
    return run_any(bx_mechanism(inst.graph, std::vector<double>(inst.num_nodes(), 1.0)), inst);
  };
  const auto inst = generate_random_vc_instance(14, 0.3, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(truthfulness_check(mech, inst, 9, exec_of(state)).max_gain);
}
BENCHMARK(truthfulness_grid)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
