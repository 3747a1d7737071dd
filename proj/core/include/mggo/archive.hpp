#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace mggo {

struct Elite {
  Eigen::VectorXd solution;
  double objective = 0.0;
  double measure = 0.0;
  /// Free-form payload (e.g. the decoded graph); not interpreted.
  nlohmann::json metadata;
};

struct ArchiveAddResult {
  int cell = -1;
  /// objective - threshold before insertion.
  double improvement = 0.0;
  bool inserted = false;
  bool new_cell = false;
};

/// One-dimensional grid archive over a measure in [0, 1].
///
/// A cell accepts a solution when its objective exceeds the cell threshold,
/// which starts at `threshold_min`. On acceptance the elite is replaced and
/// the threshold anneals toward the objective:
/// t <- (1 - learning_rate) * t + learning_rate * f. With learning_rate 1
/// and threshold_min = -inf this is a plain keep-the-best archive.
class MeasureArchive {
 public:
  enum class Kind { Optimization, Result };

  MeasureArchive(Kind kind, int cells, double learning_rate, double threshold_min);

  static MeasureArchive optimization(int cells, double learning_rate, double threshold_min) {
    return MeasureArchive(Kind::Optimization, cells, learning_rate, threshold_min);
  }
  static MeasureArchive result(int cells);

  ArchiveAddResult add(const Eigen::VectorXd& solution, double objective, double measure,
                       nlohmann::json metadata = {});

  int cell_of(double measure) const;
  Kind kind() const noexcept { return kind_; }
  int num_cells() const noexcept { return static_cast<int>(elites_.size()); }
  int occupied() const;
  double coverage() const { return static_cast<double>(occupied()) / num_cells(); }
  /// Sum over elites of (objective - offset). Pick an offset below every
  /// reachable objective so that filling a cell never lowers the score.
  double qd_score(double offset = 0.0) const;
  double threshold(int cell) const { return thresholds_[static_cast<std::size_t>(cell)]; }
  const std::optional<Elite>& elite(int cell) const { return elites_[static_cast<std::size_t>(cell)]; }
  /// Highest-objective elite; ties resolve to the lowest cell.
  const Elite* best() const;
  std::vector<int> occupied_cells() const;

  nlohmann::json to_json() const;
  static MeasureArchive from_json(const nlohmann::json& j);

 private:
  Kind kind_;
  double learning_rate_;
  double threshold_min_;
  std::vector<double> thresholds_;
  std::vector<std::optional<Elite>> elites_;
};

}  // namespace mggo
