#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mggo/common.hpp"

namespace mggo {

/// 4 + floor(3 ln n).
int default_cmaes_batch_size(int dimension);

struct CmaEsConfig {
  int dimension = 0;
  /// 0 selects default_cmaes_batch_size(dimension).
  int batch_size = 0;
  double sigma0 = 1.0;
  std::uint64_t seed = 0;
  /// Empty means the origin.
  Eigen::VectorXd initial_mean;
};

/// Covariance Matrix Adaptation Evolution Strategy, maximizing.
///
/// Rank-one and rank-mu covariance updates with cumulative step-size
/// adaptation and log-linear recombination weights over the best half of
/// each batch. The eigendecomposition is refreshed lazily. When every
/// fitness of a batch ties, the mean and covariance are left untouched and
/// only the evolution paths decay.
class CmaEs {
 public:
  explicit CmaEs(const CmaEsConfig& cfg);

  std::vector<Eigen::VectorXd> ask();
  /// `solutions` must be the last batch from ask(), in any order matching
  /// `fitness`. Throws on non-finite fitness.
  void tell(std::span<const Eigen::VectorXd> solutions, std::span<const double> fitness);

  /// Restarts the search distribution around `mean` with the initial step size.
  void reset(const Eigen::VectorXd& mean);
  /// Step size collapsed, covariance ill-conditioned, or state non-finite.
  bool degenerate() const;

  int dimension() const noexcept { return n_; }
  int batch_size() const noexcept { return lambda_; }
  int num_parents() const noexcept { return mu_; }
  int generation() const noexcept { return generation_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  double sigma() const noexcept { return sigma_; }
  const Eigen::MatrixXd& covariance() const noexcept { return C_; }

  /// Scalars and vectors go into the returned JSON; C and B are appended to
  /// `blob` (row-major doubles) with their offsets recorded.
  nlohmann::json save(std::vector<double>& blob) const;
  void load(const nlohmann::json& j, std::span<const double> blob);

 private:
  void update_eigensystem(bool force);

  int n_;
  int lambda_;
  int mu_;
  double sigma0_;
  Eigen::VectorXd weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;

  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd C_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd D_;
  bool identity_basis_ = true;
  Eigen::VectorXd p_c_;
  Eigen::VectorXd p_sigma_;
  int generation_ = 0;
  long long evaluations_ = 0;
  long long eigen_evaluations_ = 0;
  Rng rng_;
};

}  // namespace mggo
