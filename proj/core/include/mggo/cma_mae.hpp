#pragma once

#include <span>
#include <vector>

#include "mggo/archive.hpp"
#include "mggo/cmaes.hpp"

namespace mggo {

struct CmaMaeConfig {
  CmaEsConfig es;
  int archive_cells = 100;
  /// Threshold annealing rate of the optimization archive.
  double archive_learning_rate = 0.01;
  double threshold_min = 0.0;
};

struct CmaMaeTellStats {
  int inserted = 0;
  int new_cells = 0;
  bool restarted = false;
};

/// CMA-MAE with a single Gaussian emitter.
///
/// Each told solution is added, in batch order, to the optimization archive
/// under `f_opt` and to the result archive under `f_res`. The emitter ranks
/// the batch by improvement over the optimization-archive thresholds. It
/// restarts from a random optimization-archive elite when the Gaussian
/// degenerates or no member of a batch was accepted.
class CmaMae {
 public:
  explicit CmaMae(const CmaMaeConfig& cfg);

  std::vector<Eigen::VectorXd> ask() { return es_.ask(); }

  /// A batch shorter than batch_size() only updates the archives.
  CmaMaeTellStats tell(std::span<const Eigen::VectorXd> solutions, std::span<const double> f_opt,
                       std::span<const double> f_res, std::span<const double> measures,
                       std::span<const nlohmann::json> metadata = {});

  int batch_size() const noexcept { return es_.batch_size(); }
  int restarts() const noexcept { return restarts_; }
  const CmaEs& emitter() const noexcept { return es_; }
  const MeasureArchive& optimization_archive() const noexcept { return opt_; }
  const MeasureArchive& result_archive() const noexcept { return res_; }

  nlohmann::json save(std::vector<double>& blob) const;
  void load(const nlohmann::json& j, std::span<const double> blob);

 private:
  CmaEs es_;
  MeasureArchive opt_;
  MeasureArchive res_;
  Rng rng_;
  int restarts_ = 0;
};

}  // namespace mggo
