#include <doctest.h>

#include <cmath>
#include <limits>

#include "mggo/cma_mae.hpp"
#include "mggo/cmaes.hpp"
#include "mggo/evolutionary.hpp"
#include "mggo/mutation.hpp"
#include "mggo/scc.hpp"
#include "test_support.hpp"

using namespace mggo;

namespace {

std::vector<int> changed_edges(const MixedGuidanceGraph& a, const MixedGuidanceGraph& b) {
  std::vector<int> out;
  for (int e = 0; e < a.base().num_edges(); ++e)
    if (a.dir(e) != b.dir(e)) out.push_back(e);
  return out;
}

std::vector<int> out_degrees(const MixedGuidanceGraph& g) {
  std::vector<int> d;
  for (CellId c : g.base().vertices()) {
    int k = 0;
    for (Heading h : kHeadings) k += g.has_move(c, h);
    d.push_back(k);
  }
  return d;
}

double sphere(const Eigen::VectorXd& x) { return -x.squaredNorm(); }

}  // namespace

TEST_CASE("geometric k has mean 1/p") {
  Rng rng(1);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const int k = sample_geometric_k(rng);
    CHECK(k >= 1);
    sum += k;
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.03));
  CHECK(sample_geometric_k(rng, 1.0) == 1);
  CHECK_THROWS_AS(sample_geometric_k(rng, 0.0), Error);
}

TEST_CASE("mutations reverse unidirectional edges only") {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    auto base = test::random_connected_grid(4 + static_cast<int>(uniform_index(rng, 6)),
                                            4 + static_cast<int>(uniform_index(rng, 6)), 0.25, rng);
    MixedGuidanceGraph g = test::random_weighted(base, rng, 0.2);
    for (MutationOp op : {MutationOp::KEdges, MutationOp::KVertices, MutationOp::RandomCycle}) {
      MixedGuidanceGraph m = mutate(g, op, rng);
      m.validate();
      CHECK(m.edge_count() == g.edge_count());
      CHECK(m.count_dir(EdgeDir::Both) == g.count_dir(EdgeDir::Both));
      for (int e : changed_edges(g, m)) {
        CHECK(g.dir(e) != EdgeDir::Both);
        CHECK(m.forward_weight(e) == g.backward_weight(e));
        CHECK(m.backward_weight(e) == g.forward_weight(e));
      }
      for (CellId c : base->vertices()) CHECK(m.self_loop(c) == g.self_loop(c));
    }
  }
}

TEST_CASE("k-edges reverses between one and all unidirectional edges") {
  Rng rng(4);
  auto base = test::open_grid(6, 6);
  MixedGuidanceGraph g = random_orientation(base, 3);
  std::vector<int> counts(8, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto c = changed_edges(g, mutate_k_edges(g, rng)).size();
    CHECK(c >= 1);
    if (c < counts.size()) ++counts[c];
  }
  // P(k = 1) = 1/2, P(k = 2) = 1/4.
  CHECK(counts[1] / 2000.0 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(counts[2] / 2000.0 == doctest::Approx(0.25).epsilon(0.15));
  MixedGuidanceGraph bidirected(base);
  CHECK(mutate_k_edges(bidirected, rng) == bidirected);
}

TEST_CASE("k-vertices flips whole vertex neighbourhoods") {
  Rng rng(6);
  auto base = test::open_grid(5, 5);
  MixedGuidanceGraph g = random_orientation(base, 2);
  for (int i = 0; i < 300; ++i) {
    MixedGuidanceGraph m = mutate_k_vertices(g, rng);
    const auto ch = changed_edges(g, m);
    REQUIRE_FALSE(ch.empty());
    std::vector<char> flipped(static_cast<std::size_t>(base->num_edges()), 0);
    for (int e : ch) flipped[e] = 1;
    // Every changed edge has an endpoint all of whose edges changed.
    for (int e : ch) {
      bool covered = false;
      for (CellId c : {base->edges()[e].u, base->edges()[e].v}) {
        bool all = true;
        for (Heading h : kHeadings) {
          const int f = base->edge_at(c, h);
          if (f >= 0 && !flipped[f]) all = false;
        }
        covered |= all;
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("random-cycle reversal keeps degrees and strong connectivity") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    auto base = test::random_connected_grid(4 + static_cast<int>(uniform_index(rng, 6)),
                                            4 + static_cast<int>(uniform_index(rng, 6)), 0.2, rng);
    MixedGuidanceGraph g = dfs_orientation(base, static_cast<std::uint64_t>(t));
    MixedGuidanceGraph m = mutate_random_cycle(g, rng);
    CHECK(out_degrees(m) == out_degrees(g));
    CHECK(is_strongly_connected(m));
    const auto ch = changed_edges(g, m);
    CHECK((ch.empty() || ch.size() >= 4));
  }
  auto tree = test::grid({"....."});
  MixedGuidanceGraph path(tree);
  CHECK(mutate_random_cycle(path, rng) == path);
}

TEST_CASE("EA batch helpers") {
  CHECK(ea_batch_size(1) == 3);
  CHECK(ea_batch_size(12) == 12);
  CHECK(ea_batch_size(13) == 15);
  CHECK(ea_operator_for(0, 12) == MutationOp::KEdges);
  CHECK(ea_operator_for(3, 12) == MutationOp::KEdges);
  CHECK(ea_operator_for(4, 12) == MutationOp::KVertices);
  CHECK(ea_operator_for(8, 12) == MutationOp::RandomCycle);
  CHECK(ea_operator_for(11, 12) == MutationOp::RandomCycle);
}

TEST_CASE("EA initial batch and children are repaired") {
  auto base = build_base_graph(load_map(test::map_path("warehouse-9-15")));
  const auto init = ea_initial_batch(base, 12, 3);
  REQUIRE(init.size() == 12);
  for (const auto& r : init) {
    CHECK(is_strongly_connected(r.graph));
    r.graph.validate();
  }
  // First third is crisscross: before repair every non-bridge edge was directed.
  CHECK(init[0].graph.count_dir(EdgeDir::Both) == static_cast<int>(base->bridges().size()));

  EaState st;
  st.batch_size = 12;
  std::vector<MixedGuidanceGraph> graphs;
  for (const auto& r : init) graphs.push_back(r.graph);
  std::vector<double> fit(12, 1.0);
  fit[5] = 2.0;
  fit[7] = 2.0;
  CHECK(ea_select(st, graphs, fit));
  CHECK(*st.parent == graphs[5]);
  CHECK(st.eval_count == 12);
  CHECK(st.generation == 1);
  const auto kids = ea_children(st, 9);
  REQUIRE(kids.size() == 12);
  for (const auto& k : kids) CHECK(is_strongly_connected(k.graph));
  CHECK(ea_children(st, 9)[3].graph == kids[3].graph);
  std::vector<MixedGuidanceGraph> kg;
  for (const auto& k : kids) kg.push_back(k.graph);
  std::vector<double> same(12, 2.0);
  CHECK_FALSE(ea_select(st, kg, same));  // ties do not replace the parent
  CHECK(*st.parent == graphs[5]);
  same[11] = 2.5;
  CHECK(ea_select(st, kg, same));
  CHECK(st.parent_fitness == 2.5);
  CHECK(st.eval_count == 36);
}

TEST_CASE("CMA-ES default batch size") {
  CHECK(default_cmaes_batch_size(10) == 10);
  CHECK(default_cmaes_batch_size(1) == 4);
  CHECK(default_cmaes_batch_size(3479) == 4 + static_cast<int>(std::floor(3 * std::log(3479.0))));
}

TEST_CASE("CMA-ES solves a shifted sphere") {
  CmaEsConfig cfg;
  cfg.dimension = 10;
  cfg.sigma0 = 1.0;
  cfg.seed = 2;
  cfg.initial_mean = Eigen::VectorXd::Constant(10, 3.0);
  CmaEs es(cfg);
  double best = -std::numeric_limits<double>::infinity();
  int evals = 0;
  while (evals < 5000 && best < -1e-10) {
    auto xs = es.ask();
    std::vector<double> f;
    for (const auto& x : xs) f.push_back(sphere(x));
    evals += static_cast<int>(xs.size());
    best = std::max(best, *std::max_element(f.begin(), f.end()));
    es.tell(xs, f);
  }
  CHECK(-best < 1e-10);
  CHECK(evals < 5000);
}

TEST_CASE("CMA-ES state round-trips through save/load") {
  CmaEsConfig cfg;
  cfg.dimension = 6;
  cfg.seed = 5;
  CmaEs a(cfg);
  for (int g = 0; g < 30; ++g) {
    auto xs = a.ask();
    std::vector<double> f;
    for (const auto& x : xs) f.push_back(sphere(x));
    a.tell(xs, f);
  }
  std::vector<double> blob;
  const auto j = a.save(blob);
  CmaEs b(cfg);
  b.load(nlohmann::json::parse(j.dump()), blob);
  const auto xa = a.ask();
  const auto xb = b.ask();
  for (std::size_t i = 0; i < xa.size(); ++i) CHECK(xa[i] == xb[i]);
  CHECK(a.sigma() == b.sigma());
}

TEST_CASE("CMA-ES flat fitness leaves the mean alone; bad input throws") {
  CmaEsConfig cfg;
  cfg.dimension = 4;
  CmaEs es(cfg);
  const Eigen::VectorXd m0 = es.mean();
  auto xs = es.ask();
  es.tell(xs, std::vector<double>(xs.size(), 1.0));
  CHECK(es.mean() == m0);
  xs = es.ask();
  std::vector<double> f(xs.size(), 0.0);
  f[0] = std::nan("");
  CHECK_THROWS_AS(es.tell(xs, f), Error);
  CHECK_THROWS_AS(es.tell(std::span(xs).first(2), std::span(f).first(2)), Error);
}

TEST_CASE("archive insertion and threshold annealing by hand") {
  MeasureArchive a = MeasureArchive::optimization(4, 0.5, 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  auto r = a.add(x, 2.0, 0.1);
  CHECK(r.cell == 0);
  CHECK(r.inserted);
  CHECK(r.new_cell);
  CHECK(r.improvement == 2.0);
  CHECK(a.threshold(0) == 1.0);
  r = a.add(x, 1.5, 0.2);
  CHECK(r.inserted);  // 1.5 > 1.0 although below the elite's 2.0
  CHECK_FALSE(r.new_cell);
  CHECK(a.threshold(0) == 1.25);
  CHECK(a.elite(0)->objective == 1.5);
  r = a.add(x, 1.0, 0.24);
  CHECK_FALSE(r.inserted);
  CHECK(r.improvement == -0.25);
  CHECK(a.cell_of(1.0) == 3);
  CHECK(a.cell_of(0.25) == 1);
  CHECK_THROWS_AS(a.add(x, 1.0, 1.5), Error);
  a.add(x, -1.0, 0.9);  // below threshold_min
  CHECK(a.occupied() == 1);
  CHECK(a.coverage() == 0.25);

  MeasureArchive res = MeasureArchive::result(4);
  res.add(x, -3.0, 0.9);
  res.add(x, 5.0, 0.5);
  res.add(x, 4.0, 0.5);
  CHECK(res.occupied() == 2);
  CHECK(res.qd_score() == 2.0);
  CHECK(res.best()->objective == 5.0);
  const auto back = MeasureArchive::from_json(nlohmann::json::parse(res.to_json().dump()));
  CHECK(back.qd_score() == res.qd_score());
  CHECK(back.threshold(0) == res.threshold(0));
  CHECK(std::isinf(back.threshold(0)));
}

TEST_CASE("CMA-MAE fills a toy archive and its QD-score never drops") {
  CmaMaeConfig cfg;
  cfg.es.dimension = 6;
  cfg.es.sigma0 = 0.5;
  cfg.es.seed = 3;
  cfg.archive_cells = 50;
  cfg.threshold_min = 0.0;
  CmaMae mae(cfg);
  double qd = -std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int evals = 0; evals < 2000;) {
    auto xs = mae.ask();
    std::vector<double> f, m;
    for (const auto& x : xs) {
      f.push_back(1.0 / (1.0 + x.squaredNorm()));
      m.push_back(1.0 / (1.0 + std::exp(-x[0])));
    }
    mae.tell(xs, f, f, m);
    evals += static_cast<int>(xs.size());
    const double now = mae.result_archive().qd_score();
    if (mae.result_archive().occupied() > 0 && now < qd - 1e-12 && std::isfinite(qd)) monotone = false;
    if (mae.result_archive().occupied() > 0) qd = now;
  }
  CHECK(monotone);
  CHECK(mae.result_archive().coverage() >= 0.5);
}
