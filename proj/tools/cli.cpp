#include "cli.hpp"

#include <algorithm>
#include <cstring>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "mggo/ers.hpp"
#include "mggo/evaluation.hpp"
#include "mggo/graph_json.hpp"
#include "mggo/orientation.hpp"
#include "mggo/pipelines.hpp"
#include "mggo/scc.hpp"
#include "mggo/simulator.hpp"
#include "mggo/update_model.hpp"

namespace mggo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = MGGO_VERSION;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex(const unsigned char* data, std::size_t n) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < n; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << int(data[i]);
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorKind::InvalidArgument, "not an integer list: " + s);
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty integer list");
  return out;
}

BaseGraphPtr load_base(const std::string& map_path) {
  if (map_path.empty()) throw Error(ErrorKind::InvalidArgument, "--map is required");
  return build_base_graph(load_map(map_path));
}

MixedGuidanceGraph load_graph(const BaseGraphPtr& base, const fs::path& path) {
  return graph_from_json(base, read_json_file(path));
}

/// Graph files named by `path`: the file itself, or every *.json in a
/// directory (sorted) that looks like a guidance graph.
std::vector<fs::path> graph_files(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    json j;
    try {
      j = read_json_file(entry.path());
    } catch (const Error&) {
      continue;
    }
    if (j.is_object() && j.contains("edges") && j.contains("self_loops")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::Io, "no guidance-graph JSON in " + path.string());
  return files;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_file_atomic(path, text);
}

void write_doubles(const fs::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<double> read_doubles(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % sizeof(double) != 0) throw Error(ErrorKind::Parse, "truncated blob " + path.string());
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

std::string eval_csv_row(const std::string& graph, int agents, const EvalSummary& s, bool with_graph) {
  std::ostringstream ss;
  if (with_graph) ss << graph << ',';
  ss << agents << ',' << format_double(s.throughput.mean) << ',' << format_double(s.throughput.stderr_) << ','
     << format_double(s.wait_ratio.mean) << ',' << format_double(s.rotate_ratio.mean) << '\n';
  return ss.str();
}

/// Tidy long-format rows: graph, agents, metric, mean, stderr.
void append_plot_rows(std::ostringstream& out, const std::string& graph, int agents, const EvalSummary& s) {
  const std::pair<const char*, const MetricSummary*> metrics[] = {
      {"throughput", &s.throughput}, {"wait_ratio", &s.wait_ratio}, {"rotate_ratio", &s.rotate_ratio}};
  for (const auto& [name, m] : metrics) {
    out << graph << ',' << agents << ',' << name << ',' << format_double(m->mean) << ','
        << format_double(m->stderr_) << '\n';
  }
}

constexpr const char* kPlotHeader = "graph,agents,metric,mean,stderr\n";

// --- optimize -------------------------------------------------------------

struct OptimizeArgs {
  std::string method, map, out, config, resume, emit_plot_data, priority, cache_dir;
  int n_eval = 0, n_phase_one = 0, agents = 0, horizon = 0, runs = 0, workers = 0, checkpoint_every = 0;
  int batch_size = 0, ea_batch_size = 0, num_observations = 0, archive_cells = 0;
  double alpha = 0, omega_lb = 0, omega_ub = 0, sigma0 = 0, archive_lr = 0, threshold_min = 0;
  std::uint64_t seed = 0;
};

std::string latest_checkpoint(const fs::path& dir) {
  std::vector<std::string> names;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw Error(ErrorKind::Io, "no checkpoint found in " + dir.string());
  return names.back();
}

TrafficPatterns cached_traffic(const BaseGraphPtr& base, const PipelineConfig& cfg, const fs::path& cache_dir) {
  const TrafficConfig t = cfg.traffic_config();
  std::ostringstream key;
  key << hex64(base->map().checksum()) << ':' << t.seed << ':' << t.num_observations << ':' << t.num_agents << ':'
      << t.horizon << ':' << to_string(t.priority) << ':' << format_double(t.bounds.lower) << ':'
      << format_double(t.bounds.upper);
  const fs::path file = cache_dir / ("traffic-" + hex64(mix_seed(std::hash<std::string>{}(key.str()))) + ".json");
  if (fs::exists(file)) {
    json j = read_json_file(file);
    if (j.value("key", "") == key.str()) return TrafficPatterns::from_json(j.at("patterns"));
  }
  TrafficPatterns p = collect_traffic_patterns(base, t);
  write_text(file, dump_json(json{{"key", key.str()}, {"patterns", p.to_json()}}));
  return p;
}

int cmd_optimize(CLI::App& sub, const OptimizeArgs& a, std::ostream& out) {
  PipelineConfig cfg;
  std::string map_path;
  int checkpoint_every = 0;
  fs::path out_dir = a.out;
  std::optional<PipelineCheckpoint> resume;
  std::optional<std::string> expected_checksum;

  if (!a.resume.empty()) {
    out_dir = a.resume;
    const json run = read_json_file(out_dir / "config.json");
    cfg = PipelineConfig::from_json(run.at("pipeline"));
    map_path = run.at("map").get<std::string>();
    checkpoint_every = run.value("checkpoint_every", 0);
    const fs::path ckdir = out_dir / "checkpoints";
    const std::string stem = latest_checkpoint(ckdir);
    resume = PipelineCheckpoint{read_json_file(ckdir / (stem + ".json")), read_doubles(ckdir / (stem + ".bin"))};
  } else if (!a.config.empty()) {
    json j = read_json_file(a.config);
    if (!j.is_object()) throw Error(ErrorKind::Parse, "config file must hold a JSON object");
    if (j.contains("manifest_version")) {
      // A run manifest: reproduce that run.
      map_path = j.at("map").at("path").get<std::string>();
      expected_checksum = j.at("map").at("checksum").get<std::string>();
      checkpoint_every = j.value("checkpoint_every", 0);
      j = j.at("config");
    } else if (j.contains("pipeline")) {
      map_path = j.value("map", "");
      checkpoint_every = j.value("checkpoint_every", 0);
      j = j.at("pipeline");
    } else {
      if (j.contains("map")) {
        map_path = j.at("map").get<std::string>();
        j.erase("map");
      }
      if (j.contains("checkpoint_every")) {
        checkpoint_every = j.at("checkpoint_every").get<int>();
        j.erase("checkpoint_every");
      }
    }
    cfg = PipelineConfig::from_json(j);
  }

  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (resume) {
    // A resumed run must keep its configuration; only the pool size may change.
    for (const char* f : {"--method", "--map", "--n-eval", "--seed", "--agents", "--horizon", "--runs", "--alpha",
                          "--priority", "--omega-lb", "--omega-ub", "--batch-size", "--ea-batch-size", "--sigma0",
                          "--n-obs", "--n-phase-one", "--archive-cells", "--archive-lr", "--threshold-min",
                          "--config"}) {
      if (given(f)) throw Error(ErrorKind::InvalidArgument, std::string(f) + " cannot be combined with --resume");
    }
  }
  if (given("--method")) cfg.method = parse_method(a.method);
  if (given("--map")) map_path = a.map;
  if (given("--n-eval")) cfg.n_eval = a.n_eval;
  if (given("--n-phase-one")) cfg.n_phase_one = a.n_phase_one;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--agents")) cfg.num_agents = a.agents;
  if (given("--horizon")) cfg.horizon = a.horizon;
  if (given("--runs")) cfg.num_runs = a.runs;
  if (given("--alpha")) cfg.alpha = a.alpha;
  if (given("--priority")) cfg.priority = parse_priority_mode(a.priority);
  if (given("--omega-lb")) cfg.bounds.lower = a.omega_lb;
  if (given("--omega-ub")) cfg.bounds.upper = a.omega_ub;
  if (given("--batch-size")) cfg.batch_size = a.batch_size;
  if (given("--ea-batch-size")) cfg.ea_batch_size = a.ea_batch_size;
  if (given("--sigma0")) cfg.sigma0 = a.sigma0;
  if (given("--n-obs")) cfg.num_observations = a.num_observations;
  if (given("--archive-cells")) cfg.archive_cells = a.archive_cells;
  if (given("--archive-lr")) cfg.archive_learning_rate = a.archive_lr;
  if (given("--threshold-min")) cfg.threshold_min = a.threshold_min;
  if (given("--workers")) cfg.workers = a.workers;
  if (given("--checkpoint-every")) checkpoint_every = a.checkpoint_every;
  if (out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");
  if (checkpoint_every < 0) throw Error(ErrorKind::InvalidArgument, "--checkpoint-every must be >= 0");
  cfg.validate();

  const std::string started = utc_now();
  BaseGraphPtr base = load_base(map_path);
  const std::string checksum = hex64(base->map().checksum());
  if (expected_checksum && *expected_checksum != checksum) {
    throw Error(ErrorKind::InvalidArgument, "map " + map_path + " does not match the manifest checksum");
  }

  fs::create_directories(out_dir / "checkpoints");
  json run_config{{"map", map_path}, {"pipeline", cfg.to_json()}, {"checkpoint_every", checkpoint_every}};
  write_text(out_dir / "config.json", dump_json(run_config));

  PipelineHooks hooks;
  hooks.checkpoint_every = checkpoint_every;
  if (resume) hooks.resume = &*resume;
  int checkpoints_written = 0;
  hooks.on_checkpoint = [&](const PipelineCheckpoint& ck) {
    const long long evals = ck.state.at("progress").at("evals").get<long long>();
    std::ostringstream stem;
    stem << "ckpt-" << std::setw(9) << std::setfill('0') << evals;
    const fs::path dir = out_dir / "checkpoints";
    write_doubles(dir / (stem.str() + ".bin.tmp"), ck.blob);
    fs::rename(dir / (stem.str() + ".bin.tmp"), dir / (stem.str() + ".bin"));
    write_text_file_atomic(dir / (stem.str() + ".json"), dump_json(ck.state));
    ++checkpoints_written;
  };
  std::optional<TrafficPatterns> traffic;
  const bool model_based = cfg.method == Method::QdJoint || cfg.method == Method::EdgeDirAwareGgoPu;
  const fs::path cache_dir = a.cache_dir.empty() ? out_dir / "cache" : fs::path(a.cache_dir);
  if (model_based) {
    traffic = cached_traffic(base, cfg, cache_dir);
    hooks.traffic = &*traffic;
  }

  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult result = run_pipeline(base, cfg, hooks);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<std::string> outputs{"best_graph.json", "eval_log.csv"};
  write_text(out_dir / "best_graph.json", dump_json(graph_to_json(result.best_graph)));
  std::ostringstream log;
  log << kEvalLogHeader << '\n';
  for (const auto& r : result.log) log << eval_log_row(r) << '\n';
  write_text(out_dir / "eval_log.csv", log.str());
  if (result.result_archive) {
    write_text(out_dir / "archive.json", dump_json(result.result_archive->to_json()));
    outputs.push_back("archive.json");
  }
  if (result.phase_one_graph) {
    write_text(out_dir / "phase_one_graph.json", dump_json(graph_to_json(*result.phase_one_graph)));
    outputs.push_back("phase_one_graph.json");
  }
  if (result.topology) {
    fs::create_directories(out_dir / "model");
    write_text(out_dir / "model" / "topology.json", dump_json(result.topology->to_json()));
    save_params(out_dir / "model" / "params.bin", result.best_params);
    outputs.push_back("model/topology.json");
    outputs.push_back("model/params.bin");
  }
  if (!a.emit_plot_data.empty()) {
    std::ostringstream plot;
    plot << "method,eval_index,phase,metric,value\n";
    for (const auto& r : result.log) {
      for (const auto& [name, v] : {std::pair<const char*, double>{"f_res", r.f_res}, {"best_f_res", r.best_f_res},
                                    {"delta", r.delta}, {"measure", r.measure}}) {
        plot << to_string(cfg.method) << ',' << r.eval_index << ',' << r.phase << ',' << name << ','
             << format_double(v) << '\n';
      }
    }
    write_text(a.emit_plot_data, plot.str());
  }

  json hashes = json::object();
  std::string combined;
  for (const auto& name : outputs) {
    const std::string h = git_blob_sha1(read_file(out_dir / name));
    hashes[name] = h;
    combined += name + ' ' + h + '\n';
  }
  const json manifest{
      {"manifest_version", 1},
      {"tool", "mggo"},
      {"tool_version", kToolVersion},
      {"config", cfg.to_json()},
      {"checkpoint_every", checkpoint_every},
      {"map", {{"path", map_path}, {"name", base->map().name()}, {"checksum", checksum}}},
      {"seeds",
       {{"root", cfg.seed},
        {"opt", derive_seed(cfg.seed, "opt")},
        {"eval", cfg.eval_config().seed},
        {"traffic", cfg.traffic_config().seed}}},
      {"started_at", started},
      {"finished_at", utc_now()},
      {"elapsed_s", elapsed},
      {"resumed", resume.has_value()},
      {"evaluations", result.evaluations},
      {"best_fitness", result.best_fitness},
      {"outputs", hashes},
      {"content_hash", git_blob_sha1(combined)}};
  write_text(out_dir / "manifest.json", dump_json(manifest));

  json summary{{"run_dir", out_dir.string()},
               {"method", to_string(cfg.method)},
               {"evaluations", result.evaluations},
               {"best_fitness", result.best_fitness},
               {"checkpoints_written", checkpoints_written},
               {"content_hash", manifest["content_hash"]}};
  if (result.phase_one_fitness) summary["phase_one_fitness"] = *result.phase_one_fitness;
  if (result.result_archive) {
    summary["archive_coverage"] = result.result_archive->coverage();
    summary["archive_qd_score"] = result.result_archive->qd_score();
  }
  out << summary.dump() << '\n';
  return 0;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string map, graph, config, trace, out, priority;
  int agents = 0, horizon = 0;
  std::uint64_t seed = 0;
};

int cmd_simulate(CLI::App& sub, const SimulateArgs& a, std::ostream& out) {
  BaseGraphPtr base = load_base(a.map);
  MixedGuidanceGraph g = a.graph.empty() ? make_unweighted(base) : load_graph(base, a.graph);
  SimConfig cfg;
  if (!a.config.empty()) {
    const json j = read_json_file(a.config);
    for (const auto& [k, v] : j.items()) {
      if (k == "agents") cfg.num_agents = v.get<int>();
      else if (k == "horizon") cfg.horizon = v.get<int>();
      else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (k == "priority") cfg.priority = parse_priority_mode(v.get<std::string>());
      else throw Error(ErrorKind::InvalidArgument, "unknown simulation config key: " + k);
    }
  }
  if (sub.count("--agents")) cfg.num_agents = a.agents;
  if (sub.count("--horizon")) cfg.horizon = a.horizon;
  if (sub.count("--seed")) cfg.seed = a.seed;
  if (sub.count("--priority")) cfg.priority = parse_priority_mode(a.priority);
  cfg.validate(*base);

  std::ofstream trace;
  TraceSink sink;
  if (!a.trace.empty()) {
    trace.open(a.trace, std::ios::trunc);
    if (!trace) throw Error(ErrorKind::Io, "cannot write " + a.trace);
    trace << "timestep,agent,row,col,heading,action,goal_row,goal_col,reached_goal\n";
    const GridMap& m = base->map();
    sink = [&](const TraceRow& r) {
      trace << r.timestep << ',' << r.agent << ',' << m.row(r.vertex) << ',' << m.col(r.vertex) << ','
            << to_string(r.heading) << ',' << to_string(r.action) << ',' << m.row(r.goal) << ','
            << m.col(r.goal) << ',' << (r.reached_goal ? 1 : 0) << '\n';
    };
  }
  const SimOutcome o = run_simulation(g, cfg, sink);
  json j{{"throughput", o.throughput},
         {"wait_ratio", o.wait_ratio},
         {"rotate_ratio", o.rotate_ratio},
         {"goals_reached", o.goals_reached},
         {"success", o.success},
         {"vertex_conflicts", o.vertex_conflicts},
         {"swap_conflicts", o.swap_conflicts},
         {"config",
          {{"agents", cfg.num_agents}, {"horizon", cfg.horizon}, {"seed", cfg.seed},
           {"priority", to_string(cfg.priority)}}},
         {"traffic", {{"shape", {o.traffic.height(), o.traffic.width(), o.traffic.channels()}},
                      {"values", std::vector<double>(o.traffic.values().begin(), o.traffic.values().end())}}}};
  if (a.out.empty()) {
    out << j.dump() << '\n';
  } else {
    write_text(a.out, dump_json(j));
  }
  return 0;
}

// --- repair ---------------------------------------------------------------

int cmd_repair(const std::string& map, const std::string& in, const std::string& out_path, std::uint64_t seed,
               std::ostream& out) {
  json j = read_json_file(in);
  GridMap m = map.empty() ? throw Error(ErrorKind::InvalidArgument, "--map is required") : load_map(map);
  BaseGraphPtr base = build_base_graph(std::move(m));
  MixedGuidanceGraph g = graph_from_json(base, j);
  const auto t0 = std::chrono::steady_clock::now();
  ErsResult r = ers_repair(std::move(g), seed);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const std::string text = dump_json(graph_to_json(r.graph));
  json stats{{"reversed_count", r.reversed_count},
             {"iterations", r.iterations},
             {"elapsed_ms", ms},
             {"bridges_added", r.bridges_added},
             {"strongly_connected", is_strongly_connected(r.graph)}};
  if (out_path.empty()) {
    out << json{{"graph", graph_to_json(r.graph)}, {"stats", stats}}.dump() << '\n';
  } else {
    write_text(out_path, text);
    out << stats.dump() << '\n';
  }
  return 0;
}

// --- evaluate / baseline --------------------------------------------------

struct EvalArgs {
  std::string map, graph, agents = "10", out, emit_plot_data, priority;
  int horizon = 500, runs = 5, workers = 0;
  std::uint64_t seed = 0;
  double omega_lb = 0.1, omega_ub = 100.0;
};

EvalConfig eval_config(CLI::App& sub, const EvalArgs& a) {
  EvalConfig c;
  c.horizon = a.horizon;
  c.num_runs = a.runs;
  c.seed = a.seed;
  c.workers = a.workers;
  if (sub.count("--priority")) c.priority = parse_priority_mode(a.priority);
  return c;
}

int emit_evaluations(CLI::App& sub, const EvalArgs& a, const std::vector<NamedGraph>& graphs, bool with_graph,
                     std::ostream& out) {
  const std::vector<int> agent_counts = parse_int_list(a.agents);
  EvalConfig base_cfg = eval_config(sub, a);
  std::ostringstream csv, plot;
  if (with_graph) csv << "graph,";
  csv << "agents,throughput_mean,throughput_stderr,wait_ratio,rotate_ratio\n";
  plot << kPlotHeader;
  for (const auto& ng : graphs) {
    for (int n : agent_counts) {
      EvalConfig c = base_cfg;
      c.num_agents = n;
      const EvalSummary s = evaluate_graph(ng.graph, c);
      csv << eval_csv_row(ng.name, n, s, with_graph);
      append_plot_rows(plot, ng.name, n, s);
    }
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  if (!a.emit_plot_data.empty()) write_text(a.emit_plot_data, plot.str());
  return 0;
}

int cmd_evaluate(CLI::App& sub, const EvalArgs& a, std::ostream& out) {
  if (a.graph.empty()) throw Error(ErrorKind::InvalidArgument, "--graph is required");
  BaseGraphPtr base = load_base(a.map);
  const auto files = graph_files(a.graph);
  std::vector<NamedGraph> graphs;
  for (const auto& f : files) graphs.push_back({f.stem().string(), load_graph(base, f)});
  return emit_evaluations(sub, a, graphs, fs::is_directory(a.graph), out);
}

int cmd_baseline(CLI::App& sub, const EvalArgs& a, const std::string& graphs_out, std::ostream& out) {
  BaseGraphPtr base = load_base(a.map);
  WeightBounds bounds{a.omega_lb, a.omega_ub};
  bounds.validate();
  const auto graphs = baseline_graphs(base, a.seed, bounds);
  if (!graphs_out.empty()) {
    for (const auto& ng : graphs) write_text(fs::path(graphs_out) / (ng.name + ".json"), dump_json(graph_to_json(ng.graph)));
  }
  return emit_evaluations(sub, a, graphs, true, out);
}

// --- generate-graph -------------------------------------------------------

struct GenerateArgs {
  std::string map, run, topology, params, traffic, out, priority;
  int agents = 16, horizon = 500, num_observations = 2;
  std::uint64_t seed = 0, ers_seed = 0;
  double omega_lb = 0.1, omega_ub = 100.0;
};

int cmd_generate(CLI::App& sub, const GenerateArgs& a, std::ostream& out) {
  BaseGraphPtr base = load_base(a.map);
  fs::path topo_path = a.topology, params_path = a.params;
  if (!a.run.empty()) {
    if (topo_path.empty()) topo_path = fs::path(a.run) / "model" / "topology.json";
    if (params_path.empty()) params_path = fs::path(a.run) / "model" / "params.bin";
  }
  if (topo_path.empty() || params_path.empty()) {
    throw Error(ErrorKind::InvalidArgument, "need --run, or both --topology and --params");
  }
  const ModelTopology topo = ModelTopology::from_json(read_json_file(topo_path));
  const std::vector<double> params = load_params(params_path, topo);
  WeightBounds bounds{a.omega_lb, a.omega_ub};
  bounds.validate();

  TrafficPatterns patterns;
  if (!a.traffic.empty()) {
    json j = read_json_file(a.traffic);
    patterns = TrafficPatterns::from_json(j.contains("patterns") ? j.at("patterns") : j);
  } else {
    TrafficConfig t;
    t.num_observations = a.num_observations;
    t.num_agents = a.agents;
    t.horizon = a.horizon;
    t.seed = a.seed;
    t.bounds = bounds;
    if (sub.count("--priority")) t.priority = parse_priority_mode(a.priority);
    patterns = collect_traffic_patterns(base, t);
  }
  const Tensor input = assemble_input(patterns);
  if (input.channels() != topo.input_depth) {
    throw Error(ErrorKind::InvalidArgument, "traffic patterns do not match the model's input depth");
  }
  const Tensor output = forward(topo, params, input);
  ErsResult r = ers_repair(decode_output(base, output, bounds), a.ers_seed);
  const std::string text = dump_json(graph_to_json(r.graph));
  json stats{{"reversed_count", r.reversed_count},
             {"iterations", r.iterations},
             {"delta", direction_similarity(r.reversed_count, base->num_non_bridge_edges())},
             {"unidirectional_ratio", r.graph.unidirectional_ratio()}};
  if (a.out.empty()) {
    out << json{{"graph", graph_to_json(r.graph)}, {"stats", stats}}.dump() << '\n';
  } else {
    write_text(a.out, text);
    out << stats.dump() << '\n';
  }
  return 0;
}

// --- inspect-map ----------------------------------------------------------

int cmd_inspect(const std::string& map, const std::string& out_path, std::ostream& out) {
  BaseGraphPtr base = load_base(map);
  json j = base_graph_to_json(*base);
  j["stats"] = {{"passable", base->num_vertices()},
                {"edges", base->num_edges()},
                {"bridges", static_cast<int>(base->bridges().size())},
                {"non_bridge_edges", base->num_non_bridge_edges()},
                {"max_mixed_edges", base->max_mixed_edges()},
                {"phase_one_variables", base->num_non_bridge_edges()},
                {"max_crisscross_period", max_crisscross_period(*base)},
                {"checksum", hex64(base->map().checksum())}};
  if (out_path.empty()) {
    out << j.dump() << '\n';
  } else {
    write_text(out_path, dump_json(j));
  }
  return 0;
}

void report(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

std::string git_blob_sha1(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error(ErrorKind::Internal, "EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorKind::Internal, "SHA-1 digest failed");
  return hex(digest, len);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed guidance graph optimization for lifelong multi-agent pathfinding", "mggo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "Run an optimization pipeline and write a run directory");
  opt->add_option("--method", oa.method, "ggo-ds | two-phase | qd-joint | edge-dir-aware-ggo-pu");
  opt->add_option("--map", oa.map, "MovingAI .map file");
  opt->add_option("--out", oa.out, "Run directory");
  opt->add_option("--config", oa.config, "Pipeline config JSON or a run manifest");
  opt->add_option("--resume", oa.resume, "Continue the run in this directory from its latest checkpoint");
  opt->add_option("--checkpoint-every", oa.checkpoint_every, "Checkpoint every G generations (0 = off)");
  opt->add_option("--n-eval", oa.n_eval);
  opt->add_option("--n-phase-one", oa.n_phase_one, "Two-phase budget of phase one");
  opt->add_option("--seed", oa.seed);
  opt->add_option("--agents", oa.agents);
  opt->add_option("--horizon", oa.horizon);
  opt->add_option("--runs", oa.runs, "Simulations per evaluation");
  opt->add_option("--alpha", oa.alpha);
  opt->add_option("--priority", oa.priority, "dist-to-goal | elapsed-time");
  opt->add_option("--omega-lb", oa.omega_lb);
  opt->add_option("--omega-ub", oa.omega_ub);
  opt->add_option("--batch-size", oa.batch_size, "CMA-ES / CMA-MAE batch (0 = default)");
  opt->add_option("--ea-batch-size", oa.ea_batch_size);
  opt->add_option("--sigma0", oa.sigma0);
  opt->add_option("--n-obs", oa.num_observations);
  opt->add_option("--archive-cells", oa.archive_cells);
  opt->add_option("--archive-lr", oa.archive_lr);
  opt->add_option("--threshold-min", oa.threshold_min);
  opt->add_option("--workers", oa.workers, "Evaluation threads (0 = logical cores)");
  opt->add_option("--cache-dir", oa.cache_dir, "Traffic pattern cache (default <out>/cache)");
  opt->add_option("--emit-plot-data", oa.emit_plot_data, "Tidy CSV of the evaluation log");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate lifelong MAPF on a guidance graph");
  sim->add_option("--map", sa.map)->required();
  sim->add_option("--graph", sa.graph, "Guidance-graph JSON (default: unweighted)");
  sim->add_option("--config", sa.config, "JSON with agents, horizon, seed, priority");
  sim->add_option("--agents", sa.agents);
  sim->add_option("--horizon", sa.horizon);
  sim->add_option("--seed", sa.seed);
  sim->add_option("--priority", sa.priority);
  sim->add_option("--trace", sa.trace, "Per-timestep CSV trace");
  sim->add_option("--out", sa.out, "Outcome JSON (default: stdout)");

  std::string rep_map, rep_in, rep_out;
  std::uint64_t rep_seed = 0;
  auto* rep = app.add_subcommand("repair", "Make a guidance graph strongly connected with ERS");
  rep->add_option("--map", rep_map)->required();
  rep->add_option("--in", rep_in)->required();
  rep->add_option("--out", rep_out, "Repaired graph JSON (default: graph and stats on stdout)");
  rep->add_option("--seed", rep_seed);

  EvalArgs ea;
  auto add_eval_options = [](CLI::App* s, EvalArgs& e) {
    s->add_option("--map", e.map)->required();
    s->add_option("--agents", e.agents, "Comma-separated agent counts");
    s->add_option("--horizon", e.horizon);
    s->add_option("--runs", e.runs);
    s->add_option("--seed", e.seed);
    s->add_option("--priority", e.priority);
    s->add_option("--workers", e.workers);
    s->add_option("--out", e.out, "CSV output (default: stdout)");
    s->add_option("--emit-plot-data", e.emit_plot_data, "Tidy CSV: graph, agents, metric, mean, stderr");
  };
  auto* ev = app.add_subcommand("evaluate", "Throughput of a graph, or of every graph in a directory");
  add_eval_options(ev, ea);
  ev->add_option("--graph", ea.graph)->required();

  EvalArgs ba;
  std::string baseline_graphs_out;
  auto* bl = app.add_subcommand("baseline", "Evaluate the no-guidance and repaired crisscross baselines");
  add_eval_options(bl, ba);
  bl->add_option("--omega-lb", ba.omega_lb);
  bl->add_option("--omega-ub", ba.omega_ub);
  bl->add_option("--graphs-out", baseline_graphs_out, "Also write the baseline graphs here");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate-graph", "Run a trained update model and repair its output");
  gen->add_option("--map", ga.map)->required();
  gen->add_option("--run", ga.run, "Run directory holding model/topology.json and model/params.bin");
  gen->add_option("--topology", ga.topology);
  gen->add_option("--params", ga.params);
  gen->add_option("--traffic", ga.traffic, "Cached traffic patterns JSON");
  gen->add_option("--agents", ga.agents);
  gen->add_option("--horizon", ga.horizon);
  gen->add_option("--n-obs", ga.num_observations);
  gen->add_option("--seed", ga.seed, "Traffic collection seed");
  gen->add_option("--priority", ga.priority);
  gen->add_option("--ers-seed", ga.ers_seed);
  gen->add_option("--omega-lb", ga.omega_lb);
  gen->add_option("--omega-ub", ga.omega_ub);
  gen->add_option("--out", ga.out);

  std::string ins_map, ins_out;
  auto* ins = app.add_subcommand("inspect-map", "Dump the base graph of a map as JSON");
  ins->add_option("--map", ins_map)->required();
  ins->add_option("--out", ins_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "invalid_argument", e.what());
    return 2;
  }

  try {
    if (*opt) return cmd_optimize(*opt, oa, out);
    if (*sim) return cmd_simulate(*sim, sa, out);
    if (*rep) return cmd_repair(rep_map, rep_in, rep_out, rep_seed, out);
    if (*ev) return cmd_evaluate(*ev, ea, out);
    if (*bl) return cmd_baseline(*bl, ba, baseline_graphs_out, out);
    if (*gen) return cmd_generate(*gen, ga, out);
    if (*ins) return cmd_inspect(ins_map, ins_out, out);
  } catch (const Error& e) {
    report(err, to_string(e.kind()), e.what());
    return 1;
  } catch (const json::exception& e) {
    report(err, "parse", e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    report(err, "io", e.what());
    return 1;
  } catch (const std::bad_alloc&) {
    report(err, "limit", "out of memory");
    return 1;
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return 1;
  }
  report(err, "internal", "no subcommand ran");
  return 1;
}

}  // namespace mggo::cli
