#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mggo/archive.hpp"
#include "mggo/evaluation.hpp"
#include "mggo/traffic.hpp"
#include "mggo/update_model.hpp"

namespace mggo {

enum class Method : std::uint8_t { GgoDs, TwoPhase, QdJoint, EdgeDirAwareGgoPu };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct PipelineConfig {
  Method method = Method::GgoDs;
  int n_eval = 500;
  /// Two-phase only; negative selects a quarter of n_eval.
  int n_phase_one = -1;
  double alpha = 3.0;
  int num_agents = 16;
  int horizon = 500;
  int num_runs = 5;  // N_e
  std::uint64_t seed = 0;
  PriorityMode priority = PriorityMode::DistToGoal;
  WeightBounds bounds{};
  /// CMA-ES / CMA-MAE batch; 0 selects 4 + floor(3 ln n).
  int batch_size = 0;
  /// Two-phase EA batch; rounded up to a multiple of 3.
  int ea_batch_size = 12;
  /// 0 selects 1.0 for weight search and 0.5 for model parameters.
  double sigma0 = 0.0;
  int num_observations = 2;
  int archive_cells = 100;
  double archive_learning_rate = 0.01;
  double threshold_min = 0.0;
  int workers = 0;

  void validate() const;
  int phase_one_budget() const;
  double resolved_sigma0() const;
  TrafficConfig traffic_config() const;
  EvalConfig eval_config() const;

  nlohmann::json to_json() const;
  /// Keys absent from `j` keep the values of `defaults`; unknown keys throw.
  static PipelineConfig from_json(const nlohmann::json& j, PipelineConfig defaults);
  static PipelineConfig from_json(const nlohmann::json& j) { return from_json(j, PipelineConfig()); }
};

/// One evaluated candidate. f_opt = f_res + alpha * delta for the joint
/// method; elsewhere delta is 1 when no repair happened and f_opt = f_res.
struct EvalRecord {
  long long eval_index = 0;
  std::string phase;
  double f_res = 0.0;
  double delta = 1.0;
  double f_opt = 0.0;
  double measure = 0.0;
  int reversed = 0;
  /// Best f_res seen so far, this evaluation included.
  double best_f_res = 0.0;

  nlohmann::json to_json() const;
  static EvalRecord from_json(const nlohmann::json& j);
};

inline constexpr const char* kEvalLogHeader = "eval_index,phase,f_res,delta,f_opt,measure,reversed,best_f_res";
std::string eval_log_row(const EvalRecord& r);

/// 1 - reversed / non-bridge edges, clamped to [0, 1]; 1 without non-bridge edges.
double direction_similarity(int reversed, int non_bridge_edges);

/// Live directed move weights (edge order, forward before backward) and
/// then self-loops (vertex order) of a template graph, as a search vector.
class WeightSearchSpace {
 public:
  explicit WeightSearchSpace(MixedGuidanceGraph tmpl);
  int dimension() const noexcept { return dimension_; }
  /// Min-max normalizes `x` into the bounds and writes it onto the template.
  MixedGuidanceGraph decode(const Eigen::VectorXd& x) const;

 private:
  MixedGuidanceGraph tmpl_;
  int dimension_;
};

struct PipelineCheckpoint {
  nlohmann::json state;
  std::vector<double> blob;
};

struct PipelineHooks {
  /// Checkpoint after every this many completed generations; 0 disables.
  int checkpoint_every = 0;
  std::function<void(const PipelineCheckpoint&)> on_checkpoint;
  /// Continue from a checkpoint produced by the same configuration.
  const PipelineCheckpoint* resume = nullptr;
  /// Precomputed traffic patterns for the model-based methods.
  const TrafficPatterns* traffic = nullptr;
};

struct PipelineResult {
  explicit PipelineResult(MixedGuidanceGraph best) : best_graph(std::move(best)) {}

  MixedGuidanceGraph best_graph;
  double best_fitness = 0.0;
  long long evaluations = 0;
  std::vector<EvalRecord> log;
  /// Joint method only.
  std::optional<MeasureArchive> result_archive;
  /// Two-phase only.
  std::optional<double> phase_one_fitness;
  std::optional<MixedGuidanceGraph> phase_one_graph;
  /// Model-based methods only.
  std::optional<ModelTopology> topology;
  std::vector<double> best_params;
  std::optional<TrafficPatterns> traffic;
};

PipelineResult run_ggo_ds(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks = {});
PipelineResult run_two_phase(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks = {});
PipelineResult run_qd_joint(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks = {});
PipelineResult run_edge_dir_aware_ggo_pu(const BaseGraphPtr& base, const PipelineConfig& cfg,
                                         const PipelineHooks& hooks = {});
/// Dispatches on cfg.method.
PipelineResult run_pipeline(const BaseGraphPtr& base, const PipelineConfig& cfg, const PipelineHooks& hooks = {});

}  // namespace mggo
