#include <doctest.h>

#include "mggo/ers.hpp"
#include "mggo/pipelines.hpp"
#include "mggo/scc.hpp"
#include "test_support.hpp"

using namespace mggo;

namespace {

PipelineConfig small(Method m, int n_eval) {
  PipelineConfig c;
  c.method = m;
  c.n_eval = n_eval;
  c.num_agents = 6;
  c.horizon = 40;
  c.num_runs = 2;
  c.seed = 11;
  c.workers = 2;
  return c;
}

void check_run(const PipelineResult& r, const PipelineConfig& cfg) {
  CHECK(r.evaluations == cfg.n_eval);
  REQUIRE(r.log.size() == static_cast<std::size_t>(cfg.n_eval));
  double best = -1;
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    const EvalRecord& e = r.log[i];
    CHECK(e.eval_index == static_cast<long long>(i));
    CHECK(e.delta >= 0.0);
    CHECK(e.delta <= 1.0);
    CHECK((e.delta == 1.0) == (e.reversed == 0));
    CHECK(e.measure >= 0.0);
    CHECK(e.measure <= 1.0);
    best = std::max(best, e.f_res);
    CHECK(e.best_f_res == best);
    if (cfg.method == Method::QdJoint) {
      CHECK(e.f_opt == doctest::Approx(e.f_res + cfg.alpha * e.delta));
    } else {
      CHECK(e.f_opt == e.f_res);
    }
  }
  CHECK(r.best_fitness == best);
  r.best_graph.validate();
  CHECK(is_strongly_connected(r.best_graph));
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::GgoDs, Method::TwoPhase, Method::QdJoint, Method::EdgeDirAwareGgoPu}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("ggo"), Error);
}

TEST_CASE("pipeline config JSON") {
  PipelineConfig c = small(Method::QdJoint, 77);
  c.bounds = {0.5, 20.0};
  const auto j = c.to_json();
  CHECK(PipelineConfig::from_json(j).to_json() == j);
  auto bad = j;
  bad["colour"] = "blue";
  CHECK_THROWS_AS(PipelineConfig::from_json(bad), Error);
  PipelineConfig d = PipelineConfig::from_json(nlohmann::json{{"n_eval", 9}}, c);
  CHECK(d.n_eval == 9);
  CHECK(d.method == Method::QdJoint);
  c.n_eval = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  PipelineConfig t = small(Method::TwoPhase, 100);
  CHECK(t.phase_one_budget() == 25);
  t.n_phase_one = 101;
  CHECK_THROWS_AS(t.validate(), Error);
  CHECK(small(Method::GgoDs, 1).resolved_sigma0() == 1.0);
  CHECK(small(Method::QdJoint, 1).resolved_sigma0() == 0.5);
}

TEST_CASE("direction similarity") {
  CHECK(direction_similarity(0, 10) == 1.0);
  CHECK(direction_similarity(4, 10) == doctest::Approx(0.6));
  CHECK(direction_similarity(25, 10) == 0.0);
  CHECK(direction_similarity(3, 0) == 1.0);
}

TEST_CASE("weight search space covers live directions and self-loops") {
  auto base = test::open_grid(3, 3);
  MixedGuidanceGraph tmpl = crisscross(base, 1);
  WeightSearchSpace s(tmpl);
  CHECK(s.dimension() == tmpl.edge_count());
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(s.dimension(), 0.0, 1.0);
  MixedGuidanceGraph g = s.decode(x);
  for (int e = 0; e < base->num_edges(); ++e) CHECK(g.dir(e) == tmpl.dir(e));
  CHECK(g.self_loop(base->vertices().back()) == tmpl.bounds().upper);
  const int first = 0;
  const double w0 = has_forward(g.dir(first)) ? g.forward_weight(first) : g.backward_weight(first);
  CHECK(w0 == tmpl.bounds().lower);
  g.validate();
}

TEST_CASE("every pipeline spends exactly its budget and emits valid graphs") {
  auto base = test::open_grid(5, 5);
  for (Method m : {Method::GgoDs, Method::TwoPhase, Method::QdJoint, Method::EdgeDirAwareGgoPu}) {
    CAPTURE(to_string(m));
    for (int n : {1, 23}) {
      const PipelineConfig cfg = small(m, n);
      const PipelineResult r = run_pipeline(base, cfg);
      check_run(r, cfg);
    }
  }
}

TEST_CASE("pipelines are deterministic and independent of the worker count") {
  auto base = test::open_grid(5, 5);
  for (Method m : {Method::TwoPhase, Method::QdJoint}) {
    PipelineConfig cfg = small(m, 30);
    const PipelineResult a = run_pipeline(base, cfg);
    cfg.workers = 1;
    const PipelineResult b = run_pipeline(base, cfg);
    CHECK(a.best_graph == b.best_graph);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(eval_log_row(a.log[i]) == eval_log_row(b.log[i]));
  }
}

TEST_CASE("two-phase keeps the phase-one winner's directions") {
  auto base = test::open_grid(5, 5);
  PipelineConfig cfg = small(Method::TwoPhase, 40);
  cfg.n_phase_one = 15;
  const PipelineResult r = run_pipeline(base, cfg);
  REQUIRE(r.phase_one_graph);
  REQUIRE(r.phase_one_fitness);
  int one = 0;
  for (const auto& e : r.log) one += e.phase == "one";
  CHECK(one == 15);
  CHECK(r.best_fitness >= *r.phase_one_fitness);
  if (r.best_fitness > *r.phase_one_fitness) {
    for (int e = 0; e < base->num_edges(); ++e) CHECK(r.best_graph.dir(e) == r.phase_one_graph->dir(e));
  }
}

TEST_CASE("joint pipeline fills its result archive") {
  auto base = test::open_grid(5, 5);
  const PipelineConfig cfg = small(Method::QdJoint, 40);
  const PipelineResult r = run_pipeline(base, cfg);
  REQUIRE(r.result_archive);
  CHECK(r.result_archive->occupied() >= 1);
  CHECK(r.result_archive->best()->objective == r.best_fitness);
  REQUIRE(r.topology);
  CHECK(r.topology->output_depth == 11);
  CHECK(r.best_params.size() == static_cast<std::size_t>(r.topology->param_count()));
  REQUIRE(r.traffic);
}

TEST_CASE("resuming from any checkpoint reproduces the uninterrupted run") {
  auto base = test::open_grid(5, 5);
  for (Method m : {Method::GgoDs, Method::TwoPhase, Method::QdJoint, Method::EdgeDirAwareGgoPu}) {
    CAPTURE(to_string(m));
    const PipelineConfig cfg = small(m, 90);
    std::vector<PipelineCheckpoint> cks;
    PipelineHooks hooks;
    hooks.checkpoint_every = 1;
    hooks.on_checkpoint = [&](const PipelineCheckpoint& c) {
      cks.push_back({nlohmann::json::parse(c.state.dump()), c.blob});
    };
    const PipelineResult full = run_pipeline(base, cfg, hooks);
    REQUIRE(cks.size() >= 2);
    PipelineHooks again;
    again.resume = &cks[cks.size() / 2];
    const PipelineResult resumed = run_pipeline(base, cfg, again);
    CHECK(resumed.best_graph == full.best_graph);
    CHECK(resumed.best_fitness == full.best_fitness);
    REQUIRE(resumed.log.size() == full.log.size());
    for (std::size_t i = 0; i < full.log.size(); ++i) CHECK(eval_log_row(resumed.log[i]) == eval_log_row(full.log[i]));

    PipelineConfig other = cfg;
    other.seed += 1;
    CHECK_THROWS_AS(run_pipeline(base, other, again), Error);
  }
}
