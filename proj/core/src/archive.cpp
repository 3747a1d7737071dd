#include "mggo/archive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mggo/common.hpp"

namespace mggo {

using nlohmann::json;

MeasureArchive::MeasureArchive(Kind kind, int cells, double learning_rate, double threshold_min)
    : kind_(kind), learning_rate_(learning_rate), threshold_min_(threshold_min) {
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "archive needs at least one cell");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "archive learning rate must be in (0, 1]");
  }
  thresholds_.assign(static_cast<std::size_t>(cells), threshold_min);
  elites_.resize(static_cast<std::size_t>(cells));
}

MeasureArchive MeasureArchive::result(int cells) {
  return MeasureArchive(Kind::Result, cells, 1.0, -std::numeric_limits<double>::infinity());
}

int MeasureArchive::cell_of(double measure) const {
  if (!std::isfinite(measure) || measure < 0.0 || measure > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "measure must lie in [0, 1]");
  }
  return std::min(num_cells() - 1, static_cast<int>(measure * num_cells()));
}

ArchiveAddResult MeasureArchive::add(const Eigen::VectorXd& solution, double objective, double measure,
                                     json metadata) {
  if (!std::isfinite(objective)) throw Error(ErrorKind::InvalidArgument, "archive objective is not finite");
  ArchiveAddResult r;
  r.cell = cell_of(measure);
  const auto c = static_cast<std::size_t>(r.cell);
  double& t = thresholds_[c];
  r.improvement = std::isfinite(t) ? objective - t : std::numeric_limits<double>::max();
  if (objective > t) {
    r.inserted = true;
    r.new_cell = !elites_[c].has_value();
    t = std::isfinite(t) ? (1.0 - learning_rate_) * t + learning_rate_ * objective : objective;
    elites_[c] = Elite{solution, objective, measure, std::move(metadata)};
  }
  return r;
}

int MeasureArchive::occupied() const {
  return static_cast<int>(std::count_if(elites_.begin(), elites_.end(), [](const auto& e) { return e.has_value(); }));
}

double MeasureArchive::qd_score(double offset) const {
  double s = 0.0;
  for (const auto& e : elites_) {
    if (e) s += e->objective - offset;
  }
  return s;
}

const Elite* MeasureArchive::best() const {
  const Elite* best = nullptr;
  for (const auto& e : elites_) {
    if (e && (!best || e->objective > best->objective)) best = &*e;
  }
  return best;
}

std::vector<int> MeasureArchive::occupied_cells() const {
  std::vector<int> cells;
  for (std::size_t i = 0; i < elites_.size(); ++i) {
    if (elites_[i]) cells.push_back(static_cast<int>(i));
  }
  return cells;
}

json MeasureArchive::to_json() const {
  json cells = json::array();
  for (std::size_t i = 0; i < elites_.size(); ++i) {
    if (!elites_[i]) continue;
    const Elite& e = *elites_[i];
    cells.push_back({{"cell", i},
                     {"objective", e.objective},
                     {"measure", e.measure},
                     {"threshold", thresholds_[i]},
                     {"solution", std::vector<double>(e.solution.data(), e.solution.data() + e.solution.size())},
                     {"metadata", e.metadata}});
  }
  std::vector<json> thresholds;
  for (double t : thresholds_) thresholds.push_back(std::isfinite(t) ? json(t) : json(nullptr));
  return json{{"kind", kind_ == Kind::Optimization ? "optimization" : "result"},
              {"num_cells", num_cells()},
              {"learning_rate", learning_rate_},
              {"threshold_min", std::isfinite(threshold_min_) ? json(threshold_min_) : json(nullptr)},
              {"thresholds", thresholds},
              {"coverage", coverage()},
              {"qd_score", qd_score()},
              {"elites", std::move(cells)}};
}

MeasureArchive MeasureArchive::from_json(const json& j) {
  try {
    const double ninf = -std::numeric_limits<double>::infinity();
    auto num = [&](const json& v) { return v.is_null() ? ninf : v.get<double>(); };
    MeasureArchive a(j.at("kind").get<std::string>() == "optimization" ? Kind::Optimization : Kind::Result,
                     j.at("num_cells").get<int>(), j.at("learning_rate").get<double>(),
                     num(j.at("threshold_min")));
    const auto& th = j.at("thresholds");
    for (std::size_t i = 0; i < a.thresholds_.size(); ++i) a.thresholds_[i] = num(th.at(i));
    for (const auto& c : j.at("elites")) {
      const auto sol = c.at("solution").get<std::vector<double>>();
      Elite e{Eigen::Map<const Eigen::VectorXd>(sol.data(), static_cast<Eigen::Index>(sol.size())),
              c.at("objective").get<double>(), c.at("measure").get<double>(), c.at("metadata")};
      a.elites_.at(c.at("cell").get<std::size_t>()) = std::move(e);
    }
    return a;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed archive JSON: ") + ex.what());
  }
}

}  // namespace mggo
