#include "mggo/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mggo {

using nlohmann::json;

int default_cmaes_batch_size(int dimension) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(std::max(1, dimension)))));
}

CmaEs::CmaEs(const CmaEsConfig& cfg)
    : n_(cfg.dimension),
      lambda_(cfg.batch_size > 0 ? cfg.batch_size : default_cmaes_batch_size(cfg.dimension)),
      mu_(lambda_ / 2),
      sigma0_(cfg.sigma0),
      rng_(cfg.seed) {
  if (n_ < 1) throw Error(ErrorKind::InvalidArgument, "CMA-ES dimension must be positive");
  if (lambda_ < 2) throw Error(ErrorKind::InvalidArgument, "CMA-ES batch size must be at least 2");
  if (!(sigma0_ > 0.0) || !std::isfinite(sigma0_)) {
    throw Error(ErrorKind::InvalidArgument, "CMA-ES sigma0 must be positive");
  }
  const double n = n_;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_[i] = std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Eigen::VectorXd start = cfg.initial_mean.size() == 0 ? Eigen::VectorXd::Zero(n_) : cfg.initial_mean;
  if (start.size() != n_) throw Error(ErrorKind::InvalidArgument, "CMA-ES initial mean has wrong size");
  reset(start);
}

void CmaEs::reset(const Eigen::VectorXd& mean) {
  mean_ = mean;
  sigma_ = sigma0_;
  C_ = Eigen::MatrixXd::Identity(n_, n_);
  B_ = Eigen::MatrixXd::Identity(n_, n_);
  D_ = Eigen::VectorXd::Ones(n_);
  identity_basis_ = true;
  p_c_ = Eigen::VectorXd::Zero(n_);
  p_sigma_ = Eigen::VectorXd::Zero(n_);
  eigen_evaluations_ = evaluations_;
}

std::vector<Eigen::VectorXd> CmaEs::ask() {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> batch;
  batch.reserve(static_cast<std::size_t>(lambda_));
  Eigen::VectorXd z(n_);
  for (int k = 0; k < lambda_; ++k) {
    for (int i = 0; i < n_; ++i) z[i] = normal(rng_);
    if (identity_basis_) {
      batch.emplace_back(mean_ + sigma_ * D_.cwiseProduct(z));
    } else {
      batch.emplace_back(mean_ + sigma_ * (B_ * D_.cwiseProduct(z)));
    }
  }
  return batch;
}

void CmaEs::tell(std::span<const Eigen::VectorXd> solutions, std::span<const double> fitness) {
  if (solutions.size() != fitness.size() || static_cast<int>(solutions.size()) != lambda_) {
    throw Error(ErrorKind::InvalidArgument, "CMA-ES tell expects exactly one fitness per batch member");
  }
  for (double f : fitness) {
    if (!std::isfinite(f)) throw Error(ErrorKind::InvalidArgument, "CMA-ES received a non-finite fitness");
  }
  for (const auto& x : solutions) {
    if (x.size() != n_) throw Error(ErrorKind::InvalidArgument, "CMA-ES solution has wrong dimension");
  }
  ++generation_;
  evaluations_ += lambda_;

  const bool flat = std::all_of(fitness.begin(), fitness.end(), [&](double f) { return f == fitness[0]; });
  if (flat) {
    p_sigma_ *= 1.0 - c_sigma_;
    p_c_ *= 1.0 - c_c_;
    sigma_ *= std::exp((c_sigma_ / d_sigma_) * (p_sigma_.norm() / chi_n_ - 1.0));
    return;
  }

  std::vector<int> order(static_cast<std::size_t>(lambda_));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fitness[static_cast<std::size_t>(a)] > fitness[static_cast<std::size_t>(b)];
  });

  Eigen::MatrixXd Y(n_, mu_);
  for (int i = 0; i < mu_; ++i) {
    Y.col(i) = (solutions[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] - mean_) / sigma_;
  }
  const Eigen::VectorXd y_w = Y * weights_;
  mean_ += sigma_ * y_w;

  Eigen::VectorXd inv_sqrt_c_y;
  if (identity_basis_) {
    inv_sqrt_c_y = y_w.cwiseQuotient(D_);
  } else {
    inv_sqrt_c_y = B_ * (B_.transpose() * y_w).cwiseQuotient(D_);
  }
  p_sigma_ = (1.0 - c_sigma_) * p_sigma_ + std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * inv_sqrt_c_y;
  const double ps_norm = p_sigma_.norm();
  const double decay = 1.0 - std::pow(1.0 - c_sigma_, 2.0 * generation_);
  const bool h_sigma = ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n_ + 1.0)) * chi_n_;
  p_c_ = (1.0 - c_c_) * p_c_;
  if (h_sigma) p_c_ += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w;

  const double old_scale =
      1.0 - c_1_ - c_mu_ + (h_sigma ? 0.0 : c_1_ * c_c_ * (2.0 - c_c_));
  const Eigen::MatrixXd Yw = Y * weights_.cwiseSqrt().asDiagonal();
  C_ *= old_scale;
  C_.selfadjointView<Eigen::Lower>().rankUpdate(p_c_, c_1_);
  C_.selfadjointView<Eigen::Lower>().rankUpdate(Yw, c_mu_);
  for (int c = 1; c < n_; ++c) {
    for (int r = 0; r < c; ++r) C_(r, c) = C_(c, r);
  }

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
  update_eigensystem(false);
}

void CmaEs::update_eigensystem(bool force) {
  const double gap = lambda_ / ((c_1_ + c_mu_) * n_ * 10.0);
  if (!force && static_cast<double>(evaluations_ - eigen_evaluations_) < gap) return;
  eigen_evaluations_ = evaluations_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C_);
  if (solver.info() != Eigen::Success) return;
  B_ = solver.eigenvectors();
  D_ = solver.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  identity_basis_ = false;
}

bool CmaEs::degenerate() const {
  if (!std::isfinite(sigma_) || !mean_.allFinite() || !D_.allFinite()) return true;
  const double dmax = D_.maxCoeff();
  const double dmin = D_.minCoeff();
  if (sigma_ * dmax < 1e-12) return true;
  return dmin <= 0.0 || (dmax / dmin) * (dmax / dmin) > 1e14;
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from_json(const json& j, int n) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<int>(values.size()) != n) throw Error(ErrorKind::Parse, "CMA-ES checkpoint vector size mismatch");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), n);
}

std::size_t append_matrix(std::vector<double>& blob, const Eigen::MatrixXd& m) {
  const std::size_t offset = blob.size();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) blob.push_back(m(r, c));
  }
  return offset;
}

Eigen::MatrixXd read_matrix(std::span<const double> blob, std::size_t offset, int n) {
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (offset + count > blob.size()) throw Error(ErrorKind::Parse, "CMA-ES checkpoint blob is truncated");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = blob[offset + static_cast<std::size_t>(r) * n + c];
  }
  return m;
}

}  // namespace

json CmaEs::save(std::vector<double>& blob) const {
  std::ostringstream rng_state;
  rng_state << rng_;
  json j{{"dimension", n_},
         {"batch_size", lambda_},
         {"sigma0", sigma0_},
         {"sigma", sigma_},
         {"generation", generation_},
         {"evaluations", evaluations_},
         {"eigen_evaluations", eigen_evaluations_},
         {"identity_basis", identity_basis_},
         {"mean", vec_to_json(mean_)},
         {"p_c", vec_to_json(p_c_)},
         {"p_sigma", vec_to_json(p_sigma_)},
         {"D", vec_to_json(D_)},
         {"rng", rng_state.str()}};
  j["C_offset"] = append_matrix(blob, C_);
  j["B_offset"] = identity_basis_ ? json(nullptr) : json(append_matrix(blob, B_));
  return j;
}

void CmaEs::load(const json& j, std::span<const double> blob) {
  if (j.at("dimension").get<int>() != n_ || j.at("batch_size").get<int>() != lambda_) {
    throw Error(ErrorKind::Parse, "CMA-ES checkpoint does not match this optimizer's shape");
  }
  sigma_ = j.at("sigma").get<double>();
  generation_ = j.at("generation").get<int>();
  evaluations_ = j.at("evaluations").get<long long>();
  eigen_evaluations_ = j.at("eigen_evaluations").get<long long>();
  identity_basis_ = j.at("identity_basis").get<bool>();
  mean_ = vec_from_json(j.at("mean"), n_);
  p_c_ = vec_from_json(j.at("p_c"), n_);
  p_sigma_ = vec_from_json(j.at("p_sigma"), n_);
  D_ = vec_from_json(j.at("D"), n_);
  C_ = read_matrix(blob, j.at("C_offset").get<std::size_t>(), n_);
  B_ = identity_basis_ ? Eigen::MatrixXd::Identity(n_, n_)
                       : read_matrix(blob, j.at("B_offset").get<std::size_t>(), n_);
  std::istringstream in(j.at("rng").get<std::string>());
  in >> rng_;
}

}  // namespace mggo
