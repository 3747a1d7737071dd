#include <benchmark/benchmark.h>

#include "mggo/cmaes.hpp"
#include "mggo/ers.hpp"
#include "mggo/orientation.hpp"
#include "mggo/simulator.hpp"
#include "mggo/update_model.hpp"

namespace {

mggo::BaseGraphPtr open_grid(int n) {
  return mggo::build_base_graph(
      mggo::GridMap::from_rows(std::vector<std::string>(static_cast<std::size_t>(n), std::string(n, '.'))));
}

void BM_ErsRepair(benchmark::State& state) {
  auto base = open_grid(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto g = mggo::random_orientation(base, seed);
    benchmark::DoNotOptimize(mggo::ers_repair(std::move(g), seed++));
  }
}
BENCHMARK(BM_ErsRepair)->Arg(8)->Arg(16)->Arg(32);

void BM_Simulation(benchmark::State& state) {
  auto base = open_grid(16);
  const auto g = mggo::crisscross(base, 1);
  mggo::SimConfig cfg;
  cfg.num_agents = static_cast<int>(state.range(0));
  cfg.horizon = 500;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mggo::run_simulation(g, cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_Simulation)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto topo = mggo::ModelTopology::for_observations(2, mggo::kJointOutputDepth);
  std::vector<double> params(static_cast<std::size_t>(topo.param_count()), 0.01);
  mggo::Tensor input(n, n, topo.input_depth, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mggo::forward(topo, params, input));
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(32);

void BM_CmaEsAskTell(benchmark::State& state) {
  mggo::CmaEsConfig cfg;
  cfg.dimension = static_cast<int>(state.range(0));
  mggo::CmaEs es(cfg);
  for (auto _ : state) {
    auto xs = es.ask();
    std::vector<double> f;
    for (const auto& x : xs) f.push_back(-x.squaredNorm());
    es.tell(xs, f);
  }
}
BENCHMARK(BM_CmaEsAskTell)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
