#include "mggo/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mggo/ers.hpp"
#include "mggo/orientation.hpp"

namespace mggo {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < workers; ++t) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t replica_seed(std::uint64_t seed, int index) {
  return derive_seed(derive_seed(seed, "sim"), static_cast<std::uint64_t>(index));
}

MetricSummary summarize(const std::vector<double>& samples) {
  MetricSummary s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  for (double v : samples) s.mean += v;
  s.mean /= n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

namespace {

SimConfig sim_config(const EvalConfig& cfg, int replica) {
  return SimConfig{cfg.num_agents, cfg.horizon, replica_seed(cfg.seed, replica), cfg.priority};
}

void check(const EvalConfig& cfg) {
  if (cfg.num_runs < 1) throw Error(ErrorKind::InvalidArgument, "evaluation needs at least one run");
}

}  // namespace

EvalSummary evaluate_graph(const MixedGuidanceGraph& g, const EvalConfig& cfg) {
  check(cfg);
  std::vector<SimOutcome> outcomes(static_cast<std::size_t>(cfg.num_runs));
  parallel_for(cfg.num_runs, cfg.workers, [&](int i) {
    outcomes[static_cast<std::size_t>(i)] = run_simulation(g, sim_config(cfg, i));
  });
  EvalSummary s;
  std::vector<double> wait, rotate;
  for (const SimOutcome& o : outcomes) {
    s.throughputs.push_back(o.throughput);
    wait.push_back(o.wait_ratio);
    rotate.push_back(o.rotate_ratio);
    s.vertex_conflicts += o.vertex_conflicts;
    s.swap_conflicts += o.swap_conflicts;
  }
  s.throughput = summarize(s.throughputs);
  s.wait_ratio = summarize(wait);
  s.rotate_ratio = summarize(rotate);
  return s;
}

std::vector<double> evaluate_batch(std::span<const MixedGuidanceGraph> graphs, const EvalConfig& cfg) {
  check(cfg);
  std::vector<double> fitness(graphs.size());
  parallel_for(static_cast<int>(graphs.size()), cfg.workers, [&](int k) {
    const MixedGuidanceGraph& g = graphs[static_cast<std::size_t>(k)];
    CostToGoCache cache(g);
    double sum = 0.0;
    for (int i = 0; i < cfg.num_runs; ++i) sum += run_simulation(g, sim_config(cfg, i), cache).throughput;
    fitness[static_cast<std::size_t>(k)] = sum / cfg.num_runs;
  });
  return fitness;
}

std::vector<NamedGraph> baseline_graphs(const BaseGraphPtr& base, std::uint64_t seed, WeightBounds bounds) {
  std::vector<NamedGraph> out;
  out.push_back({"no-guidance", make_unweighted(base, bounds)});
  out.push_back({"crisscross-ers", ers_repair(crisscross(base, 1, bounds), derive_seed(seed, "baseline-ers")).graph});
  return out;
}

}  // namespace mggo
