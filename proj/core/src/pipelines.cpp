#include "mggo/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mggo/cma_mae.hpp"
#include "mggo/cmaes.hpp"
#include "mggo/ers.hpp"
#include "mggo/evolutionary.hpp"
#include "mggo/graph_json.hpp"
#include "mggo/orientation.hpp"

namespace mggo {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::GgoDs: return "ggo-ds";
    case Method::TwoPhase: return "two-phase";
    case Method::QdJoint: return "qd-joint";
    case Method::EdgeDirAwareGgoPu: return "edge-dir-aware-ggo-pu";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::GgoDs, Method::TwoPhase, Method::QdJoint, Method::EdgeDirAwareGgoPu}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) +
                                              "' (expected ggo-ds, two-phase, qd-joint, edge-dir-aware-ggo-pu)");
}

// ---------------------------------------------------------------------------
// Configuration

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
  };
  require(n_eval >= 1, "n_eval must be at least 1");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be finite and non-negative");
  require(num_agents >= 1, "agent count must be at least 1");
  require(horizon >= 1, "horizon must be at least 1");
  require(num_runs >= 1, "N_e must be at least 1");
  require(batch_size == 0 || batch_size >= 2, "batch size must be 0 (default) or at least 2");
  require(ea_batch_size >= 1, "EA batch size must be positive");
  require(sigma0 >= 0.0 && std::isfinite(sigma0), "sigma0 must be finite and non-negative");
  require(num_observations >= 1, "N_obs must be at least 1");
  require(archive_cells >= 1, "archive needs at least one cell");
  require(archive_learning_rate > 0.0 && archive_learning_rate <= 1.0, "archive learning rate must be in (0, 1]");
  require(std::isfinite(threshold_min), "threshold_min must be finite");
  require(workers >= 0, "workers must be non-negative");
  bounds.validate();
  if (method == Method::TwoPhase) {
    const int n1 = phase_one_budget();
    require(n1 >= 1 && n1 <= n_eval, "phase-one budget must lie in [1, n_eval]");
  }
}

int PipelineConfig::phase_one_budget() const {
  return n_phase_one >= 0 ? n_phase_one : std::max(1, n_eval / 4);
}

double PipelineConfig::resolved_sigma0() const {
  if (sigma0 > 0.0) return sigma0;
  return method == Method::QdJoint || method == Method::EdgeDirAwareGgoPu ? 0.5 : 1.0;
}

TrafficConfig PipelineConfig::traffic_config() const {
  return TrafficConfig{num_observations, num_agents, horizon, derive_seed(seed, "traffic"), priority, bounds};
}

EvalConfig PipelineConfig::eval_config() const {
  return EvalConfig{num_agents, horizon, num_runs, derive_seed(seed, "eval"), priority, workers};
}

json PipelineConfig::to_json() const {
  return json{{"method", to_string(method)},
              {"n_eval", n_eval},
              {"n_phase_one", n_phase_one},
              {"alpha", alpha},
              {"agents", num_agents},
              {"horizon", horizon},
              {"runs", num_runs},
              {"seed", seed},
              {"priority", to_string(priority)},
              {"omega_lb", bounds.lower},
              {"omega_ub", bounds.upper},
              {"batch_size", batch_size},
              {"ea_batch_size", ea_batch_size},
              {"sigma0", sigma0},
              {"num_observations", num_observations},
              {"archive_cells", archive_cells},
              {"archive_learning_rate", archive_learning_rate},
              {"threshold_min", threshold_min},
              {"workers", workers}};
}

PipelineConfig PipelineConfig::from_json(const json& j, PipelineConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "pipeline config must be a JSON object");
  static const std::vector<std::string> kKnown{
      "method",       "n_eval",        "n_phase_one", "alpha",  "agents",           "horizon",
      "runs",         "seed",          "priority",    "omega_lb", "omega_ub",       "batch_size",
      "ea_batch_size", "sigma0",       "num_observations", "archive_cells", "archive_learning_rate",
      "threshold_min", "workers"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
    }
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("priority")) c.priority = parse_priority_mode(j.at("priority").get<std::string>());
    get("n_eval", c.n_eval);
    get("n_phase_one", c.n_phase_one);
    get("alpha", c.alpha);
    get("agents", c.num_agents);
    get("horizon", c.horizon);
    get("runs", c.num_runs);
    get("seed", c.seed);
    get("omega_lb", c.bounds.lower);
    get("omega_ub", c.bounds.upper);
    get("batch_size", c.batch_size);
    get("ea_batch_size", c.ea_batch_size);
    get("sigma0", c.sigma0);
    get("num_observations", c.num_observations);
    get("archive_cells", c.archive_cells);
    get("archive_learning_rate", c.archive_learning_rate);
    get("threshold_min", c.threshold_min);
    get("workers", c.workers);
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("bad config value: ") + ex.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Records

json EvalRecord::to_json() const {
  return json{{"eval_index", eval_index}, {"phase", phase},       {"f_res", f_res},
              {"delta", delta},           {"f_opt", f_opt},       {"measure", measure},
              {"reversed", reversed},     {"best_f_res", best_f_res}};
}

EvalRecord EvalRecord::from_json(const json& j) {
  EvalRecord r;
  r.eval_index = j.at("eval_index").get<long long>();
  r.phase = j.at("phase").get<std::string>();
  r.f_res = j.at("f_res").get<double>();
  r.delta = j.at("delta").get<double>();
  r.f_opt = j.at("f_opt").get<double>();
  r.measure = j.at("measure").get<double>();
  r.reversed = j.at("reversed").get<int>();
  r.best_f_res = j.at("best_f_res").get<double>();
  return r;
}

std::string eval_log_row(const EvalRecord& r) {
  return std::to_string(r.eval_index) + "," + r.phase + "," + format_double(r.f_res) + "," +
         format_double(r.delta) + "," + format_double(r.f_opt) + "," + format_double(r.measure) + "," +
         std::to_string(r.reversed) + "," + format_double(r.best_f_res);
}

double direction_similarity(int reversed, int non_bridge_edges) {
  if (non_bridge_edges <= 0) return 1.0;
  return std::clamp(1.0 - static_cast<double>(reversed) / non_bridge_edges, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Weight search space

WeightSearchSpace::WeightSearchSpace(MixedGuidanceGraph tmpl) : tmpl_(std::move(tmpl)), dimension_(0) {
  for (int e = 0; e < tmpl_.base().num_edges(); ++e) {
    dimension_ += has_forward(tmpl_.dir(e)) ? 1 : 0;
    dimension_ += has_backward(tmpl_.dir(e)) ? 1 : 0;
  }
  dimension_ += tmpl_.base().num_vertices();
}

MixedGuidanceGraph WeightSearchSpace::decode(const Eigen::VectorXd& x) const {
  if (x.size() != dimension_) throw Error(ErrorKind::InvalidArgument, "weight vector has the wrong dimension");
  std::vector<double> w(x.data(), x.data() + x.size());
  min_max_normalize(w, tmpl_.bounds());
  MixedGuidanceGraph g = tmpl_;
  std::size_t k = 0;
  for (int e = 0; e < g.base().num_edges(); ++e) {
    const EdgeDir d = g.dir(e);
    const double f = has_forward(d) ? w[k++] : 0.0;
    const double b = has_backward(d) ? w[k++] : 0.0;
    g.set_edge(e, d, f, b);
  }
  for (CellId c : g.base().vertices()) g.set_self_loop(c, w[k++]);
  return g;
}

// ---------------------------------------------------------------------------
// Shared run machinery

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Evaluation counter, generation counter, best-so-far and the log.
struct Progress {
  long long evals = 0;
  int generation = 0;
  std::optional<MixedGuidanceGraph> best;
  double best_f = kNegInf;
  std::vector<double> best_params;
  std::vector<EvalRecord> log;

  void record(const MixedGuidanceGraph& g, std::string_view phase, double f_res, double delta, double f_opt,
              int reversed, std::span<const double> params = {}) {
    EvalRecord r;
    r.eval_index = evals++;
    r.phase = phase;
    r.f_res = f_res;
    r.delta = delta;
    r.f_opt = f_opt;
    r.measure = g.unidirectional_ratio();
    r.reversed = reversed;
    if (!best || f_res > best_f) {
      best = g;
      best_f = f_res;
      best_params.assign(params.begin(), params.end());
    }
    r.best_f_res = best_f;
    log.push_back(std::move(r));
  }

  json save() const {
    json rows = json::array();
    for (const auto& r : log) rows.push_back(r.to_json());
    return json{{"evals", evals},
                {"generation", generation},
                {"best_graph", best ? graph_to_json(*best) : json(nullptr)},
                {"best_f", best ? json(best_f) : json(nullptr)},
                {"best_params", best_params},
                {"log", std::move(rows)}};
  }

  void load(const BaseGraphPtr& base, const json& j) {
    evals = j.at("evals").get<long long>();
    generation = j.at("generation").get<int>();
    if (!j.at("best_graph").is_null()) {
      best = graph_from_json(base, j.at("best_graph"));
      best_f = j.at("best_f").get<double>();
    }
    best_params = j.at("best_params").get<std::vector<double>>();
    log.clear();
    for (const auto& r : j.at("log")) log.push_back(EvalRecord::from_json(r));
  }

  PipelineResult result() const {
    if (!best) throw Error(ErrorKind::Internal, "pipeline finished without evaluating anything");
    PipelineResult r(*best);
    r.best_fitness = best_f;
    r.evaluations = evals;
    r.log = log;
    r.best_params = best_params;
    return r;
  }
};

json comparable_config(const PipelineConfig& cfg) {
  json j = cfg.to_json();
  j.erase("workers");
  return j;
}

json checkpoint_header(const PipelineConfig& cfg) {
  return json{{"method", to_string(cfg.method)}, {"config", comparable_config(cfg)}};
}

/// The resume state, after checking it belongs to this configuration.
const json* resume_state(const PipelineConfig& cfg, const PipelineHooks& hooks) {
  if (!hooks.resume) return nullptr;
  const json& s = hooks.resume->state;
  try {
    if (s.at("method").get<std::string>() != to_string(cfg.method)) {
      throw Error(ErrorKind::InvalidArgument, "checkpoint belongs to method " + s.at("method").get<std::string>());
    }
    if (s.at("config") != comparable_config(cfg)) {
      throw Error(ErrorKind::InvalidArgument, "checkpoint was written with a different configuration");
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed checkpoint: ") + ex.what());
  }
  return &s;
}

void maybe_checkpoint(const PipelineHooks& hooks, const Progress& p,
                      const std::function<PipelineCheckpoint()>& make) {
  if (hooks.checkpoint_every > 0 && hooks.on_checkpoint && p.generation % hooks.checkpoint_every == 0) {
    hooks.on_checkpoint(make());
  }
}

std::span<const double> as_span(const Eigen::VectorXd& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

int batch_take(int lambda, long long evals, long long budget_end) {
  return static_cast<int>(std::min<long long>(lambda, budget_end - evals));
}

/// CMA-ES over a decoded search vector until `budget_end` evaluations.
/// The final batch may be partial; it is evaluated but not told.
void es_loop(CmaEs& es, Progress& p, std::string_view phase, long long budget_end,
             const std::function<MixedGuidanceGraph(const Eigen::VectorXd&)>& decode, bool keep_params,
             const EvalConfig& ecfg, const PipelineHooks& hooks,
             const std::function<PipelineCheckpoint()>& checkpoint) {
  while (p.evals < budget_end) {
    const std::vector<Eigen::VectorXd> xs = es.ask();
    const int k = batch_take(es.batch_size(), p.evals, budget_end);
    std::vector<std::optional<MixedGuidanceGraph>> decoded(static_cast<std::size_t>(k));
    parallel_for(k, ecfg.workers, [&](int i) {
      decoded[static_cast<std::size_t>(i)] = decode(xs[static_cast<std::size_t>(i)]);
    });
    std::vector<MixedGuidanceGraph> graphs;
    for (auto& g : decoded) graphs.push_back(std::move(*g));
    const std::vector<double> fitness = evaluate_batch(graphs, ecfg);
    for (int i = 0; i < k; ++i) {
      const auto u = static_cast<std::size_t>(i);
      p.record(graphs[u], phase, fitness[u], 1.0, fitness[u], 0,
               keep_params ? as_span(xs[u]) : std::span<const double>{});
    }
    if (k < es.batch_size()) break;
    es.tell(xs, fitness);
    ++p.generation;
    maybe_checkpoint(hooks, p, checkpoint);
  }
}

TrafficPatterns traffic_for(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks) {
  if (hooks.traffic) {
    if (hooks.traffic->num_observations() != cfg.num_observations ||
        hooks.traffic->unweighted_traffic.front().height() != base->height() ||
        hooks.traffic->unweighted_traffic.front().width() != base->width()) {
      throw Error(ErrorKind::InvalidArgument, "supplied traffic patterns do not match the map or N_obs");
    }
    return *hooks.traffic;
  }
  return collect_traffic_patterns(base, cfg.traffic_config());
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipelines

PipelineResult run_ggo_ds(const BaseGraphPtr& base, const PipelineConfig& cfg_in, const PipelineHooks& hooks) {
  PipelineConfig cfg = cfg_in;
  cfg.method = Method::GgoDs;
  cfg.validate();
  const WeightSearchSpace space(make_unweighted(base, cfg.bounds));
  CmaEs es({space.dimension(), cfg.batch_size, cfg.resolved_sigma0(), derive_seed(cfg.seed, "opt"), {}});
  Progress p;
  if (const json* s = resume_state(cfg, hooks)) {
    p.load(base, s->at("progress"));
    es.load(s->at("optimizer"), hooks.resume->blob);
  }
  auto checkpoint = [&] {
    PipelineCheckpoint c{checkpoint_header(cfg), {}};
    c.state["progress"] = p.save();
    c.state["optimizer"] = es.save(c.blob);
    return c;
  };
  es_loop(es, p, "ggo-ds", cfg.n_eval, [&](const Eigen::VectorXd& x) { return space.decode(x); }, false,
          cfg.eval_config(), hooks, checkpoint);
  return p.result();
}

PipelineResult run_two_phase(const BaseGraphPtr& base, const PipelineConfig& cfg_in, const PipelineHooks& hooks) {
  PipelineConfig cfg = cfg_in;
  cfg.method = Method::TwoPhase;
  cfg.validate();
  const long long n1 = cfg.phase_one_budget();
  const EvalConfig ecfg = cfg.eval_config();
  const int non_bridge = base->num_non_bridge_edges();

  EaState ea;
  ea.batch_size = ea_batch_size(cfg.ea_batch_size);
  Progress p;
  std::optional<CmaEs> es;
  std::optional<WeightSearchSpace> space;

  auto start_phase_two = [&] {
    space.emplace(*ea.parent);
    es.emplace(CmaEsConfig{space->dimension(), cfg.batch_size, cfg.resolved_sigma0(),
                           derive_seed(cfg.seed, "opt-phase-two"), {}});
  };

  if (const json* s = resume_state(cfg, hooks)) {
    p.load(base, s->at("progress"));
    const json& e = s->at("ea");
    if (!e.at("parent").is_null()) {
      ea.parent = graph_from_json(base, e.at("parent"));
      ea.parent_fitness = e.at("parent_fitness").get<double>();
    }
    ea.eval_count = e.at("eval_count").get<long long>();
    ea.generation = e.at("generation").get<int>();
    if (s->contains("optimizer")) {
      start_phase_two();
      es->load(s->at("optimizer"), hooks.resume->blob);
    }
  }

  auto checkpoint = [&] {
    PipelineCheckpoint c{checkpoint_header(cfg), {}};
    c.state["progress"] = p.save();
    c.state["ea"] = json{{"parent", ea.parent ? graph_to_json(*ea.parent) : json(nullptr)},
                         {"parent_fitness", ea.parent_fitness},
                         {"eval_count", ea.eval_count},
                         {"generation", ea.generation}};
    if (es) c.state["optimizer"] = es->save(c.blob);
    return c;
  };

  // Phase one: (1 + lambda) EA over orientations, every candidate ERS-repaired.
  while (p.evals < n1) {
    std::vector<ErsResult> batch = ea.parent ? ea_children(ea, derive_seed(cfg.seed, "mutation"))
                                             : ea_initial_batch(base, ea.batch_size, derive_seed(cfg.seed, "init"),
                                                                cfg.bounds);
    const int k = batch_take(ea.batch_size, p.evals, n1);
    std::vector<MixedGuidanceGraph> graphs;
    for (int i = 0; i < k; ++i) graphs.push_back(std::move(batch[static_cast<std::size_t>(i)].graph));
    const std::vector<double> fitness = evaluate_batch(graphs, ecfg);
    for (int i = 0; i < k; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const int reversed = batch[u].reversed_count;
      p.record(graphs[u], "one", fitness[u], direction_similarity(reversed, non_bridge), fitness[u], reversed);
    }
    ea_select(ea, graphs, fitness);
    ++p.generation;
    if (k == ea.batch_size) maybe_checkpoint(hooks, p, checkpoint);
  }

  // Phase two: weight search over the winner's edges; best-so-far carries over.
  if (!es) start_phase_two();
  es_loop(*es, p, "two", cfg.n_eval, [&](const Eigen::VectorXd& x) { return space->decode(x); }, false, ecfg,
          hooks, checkpoint);

  PipelineResult r = p.result();
  r.phase_one_fitness = ea.parent_fitness;
  r.phase_one_graph = *ea.parent;
  return r;
}

PipelineResult run_qd_joint(const BaseGraphPtr& base, const PipelineConfig& cfg_in, const PipelineHooks& hooks) {
  PipelineConfig cfg = cfg_in;
  cfg.method = Method::QdJoint;
  cfg.validate();
  const EvalConfig ecfg = cfg.eval_config();
  TrafficPatterns traffic = traffic_for(base, cfg, hooks);
  const Tensor input = assemble_input(traffic);
  const ModelTopology topo = ModelTopology::for_observations(cfg.num_observations, kJointOutputDepth);
  const int non_bridge = base->num_non_bridge_edges();
  const std::uint64_t ers_seed = derive_seed(cfg.seed, "ers");

  CmaMaeConfig mcfg;
  mcfg.es = CmaEsConfig{topo.param_count(), cfg.batch_size, cfg.resolved_sigma0(), derive_seed(cfg.seed, "opt"), {}};
  mcfg.archive_cells = cfg.archive_cells;
  mcfg.archive_learning_rate = cfg.archive_learning_rate;
  mcfg.threshold_min = cfg.threshold_min;
  CmaMae mae(mcfg);
  Progress p;
  if (const json* s = resume_state(cfg, hooks)) {
    p.load(base, s->at("progress"));
    mae.load(s->at("optimizer"), hooks.resume->blob);
  }
  auto checkpoint = [&] {
    PipelineCheckpoint c{checkpoint_header(cfg), {}};
    c.state["progress"] = p.save();
    c.state["optimizer"] = mae.save(c.blob);
    return c;
  };

  while (p.evals < cfg.n_eval) {
    const std::vector<Eigen::VectorXd> xs = mae.ask();
    const int k = batch_take(mae.batch_size(), p.evals, cfg.n_eval);
    std::vector<std::optional<ErsResult>> repaired(static_cast<std::size_t>(k));
    parallel_for(k, ecfg.workers, [&](int i) {
      const auto u = static_cast<std::size_t>(i);
      MixedGuidanceGraph g = decode_output(base, forward(topo, as_span(xs[u]), input), cfg.bounds);
      repaired[u] = ers_repair(std::move(g), derive_seed(ers_seed, static_cast<std::uint64_t>(p.evals + i)));
    });
    std::vector<MixedGuidanceGraph> graphs;
    for (auto& r : repaired) graphs.push_back(r->graph);
    const std::vector<double> f_res = evaluate_batch(graphs, ecfg);

    std::vector<double> f_opt, measures;
    std::vector<json> meta;
    for (int i = 0; i < k; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const int reversed = repaired[u]->reversed_count;
      const double delta = direction_similarity(reversed, non_bridge);
      f_opt.push_back(f_res[u] + cfg.alpha * delta);
      measures.push_back(graphs[u].unidirectional_ratio());
      meta.push_back(json{{"eval_index", p.evals}, {"graph", graph_to_json(graphs[u])}});
      p.record(graphs[u], "qd", f_res[u], delta, f_opt.back(), reversed, as_span(xs[u]));
    }
    mae.tell(std::span(xs).first(static_cast<std::size_t>(k)), f_opt, f_res, measures, meta);
    if (k < mae.batch_size()) break;
    ++p.generation;
    maybe_checkpoint(hooks, p, checkpoint);
  }

  PipelineResult r = p.result();
  r.result_archive = mae.result_archive();
  r.topology = topo;
  r.traffic = std::move(traffic);
  return r;
}

PipelineResult run_edge_dir_aware_ggo_pu(const BaseGraphPtr& base, const PipelineConfig& cfg_in,
                                         const PipelineHooks& hooks) {
  PipelineConfig cfg = cfg_in;
  cfg.method = Method::EdgeDirAwareGgoPu;
  cfg.validate();
  TrafficPatterns traffic = traffic_for(base, cfg, hooks);
  const Tensor input = assemble_input(traffic);
  const ModelTopology topo = ModelTopology::for_observations(cfg.num_observations, kWeightOnlyOutputDepth);
  CmaEs es({topo.param_count(), cfg.batch_size, cfg.resolved_sigma0(), derive_seed(cfg.seed, "opt"), {}});
  Progress p;
  if (const json* s = resume_state(cfg, hooks)) {
    p.load(base, s->at("progress"));
    es.load(s->at("optimizer"), hooks.resume->blob);
  }
  auto checkpoint = [&] {
    PipelineCheckpoint c{checkpoint_header(cfg), {}};
    c.state["progress"] = p.save();
    c.state["optimizer"] = es.save(c.blob);
    return c;
  };
  es_loop(
      es, p, "pu", cfg.n_eval,
      [&](const Eigen::VectorXd& x) { return decode_output(base, forward(topo, as_span(x), input), cfg.bounds); },
      true, cfg.eval_config(), hooks, checkpoint);

  PipelineResult r = p.result();
  r.topology = topo;
  r.traffic = std::move(traffic);
  return r;
}

PipelineResult run_pipeline(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks) {
  switch (cfg.method) {
    case Method::GgoDs: return run_ggo_ds(base, cfg, hooks);
    case Method::TwoPhase: return run_two_phase(base, cfg, hooks);
    case Method::QdJoint: return run_qd_joint(base, cfg, hooks);
    case Method::EdgeDirAwareGgoPu: return run_edge_dir_aware_ggo_pu(base, cfg, hooks);
  }
  throw Error(ErrorKind::Internal, "unknown method");
}

}  // namespace mggo
