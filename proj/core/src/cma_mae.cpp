#include "mggo/cma_mae.hpp"

#include <cmath>
#include <sstream>

namespace mggo {

using nlohmann::json;

CmaMae::CmaMae(const CmaMaeConfig& cfg)
    : es_(cfg.es),
      opt_(MeasureArchive::optimization(cfg.archive_cells, cfg.archive_learning_rate, cfg.threshold_min)),
      res_(MeasureArchive::result(cfg.archive_cells)),
      rng_(derive_seed(cfg.es.seed, "cma-mae-restart")) {}

CmaMaeTellStats CmaMae::tell(std::span<const Eigen::VectorXd> solutions, std::span<const double> f_opt,
                             std::span<const double> f_res, std::span<const double> measures,
                             std::span<const json> metadata) {
  const std::size_t n = solutions.size();
  if (f_opt.size() != n || f_res.size() != n || measures.size() != n ||
      (!metadata.empty() && metadata.size() != n)) {
    throw Error(ErrorKind::InvalidArgument, "CMA-MAE tell: argument lengths differ");
  }
  if (static_cast<int>(n) > batch_size()) {
    throw Error(ErrorKind::InvalidArgument, "CMA-MAE tell: batch larger than the emitter batch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f_opt[i]) || !std::isfinite(f_res[i]) || !std::isfinite(measures[i])) {
      throw Error(ErrorKind::InvalidArgument, "CMA-MAE tell: non-finite objective or measure");
    }
  }

  CmaMaeTellStats stats;
  std::vector<double> improvement(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json meta = metadata.empty() ? json() : metadata[i];
    const ArchiveAddResult r = opt_.add(solutions[i], f_opt[i], measures[i], meta);
    improvement[i] = r.improvement;
    stats.inserted += r.inserted ? 1 : 0;
    stats.new_cells += r.new_cell ? 1 : 0;
    res_.add(solutions[i], f_res[i], measures[i], meta);
  }
  if (static_cast<int>(n) < batch_size()) return stats;

  es_.tell(solutions, improvement);
  if (stats.inserted == 0 || es_.degenerate()) {
    const std::vector<int> cells = opt_.occupied_cells();
    Eigen::VectorXd mean = es_.mean();
    if (!cells.empty()) {
      const int cell = cells[uniform_index(rng_, cells.size())];
      mean = opt_.elite(cell)->solution;
    }
    es_.reset(mean);
    ++restarts_;
    stats.restarted = true;
  }
  return stats;
}

json CmaMae::save(std::vector<double>& blob) const {
  std::ostringstream rng_state;
  rng_state << rng_;
  return json{{"emitter", es_.save(blob)},
              {"optimization_archive", opt_.to_json()},
              {"result_archive", res_.to_json()},
              {"restarts", restarts_},
              {"rng", rng_state.str()}};
}

void CmaMae::load(const json& j, std::span<const double> blob) {
  es_.load(j.at("emitter"), blob);
  opt_ = MeasureArchive::from_json(j.at("optimization_archive"));
  res_ = MeasureArchive::from_json(j.at("result_archive"));
  restarts_ = j.at("restarts").get<int>();
  std::istringstream in(j.at("rng").get<std::string>());
  in >> rng_;
}

}  // namespace mggo
