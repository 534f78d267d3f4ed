#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace bandit {

/// Incremental ridge regressor over a selected set of (context, reward) pairs.
///
/// Keeps U = lambda*I + sum x x^T together with its inverse. The inverse is
/// maintained by rank-one Sherman-Morrison updates and rebuilt from U by a
/// Cholesky solve every kRefreshInterval updates or on demand.
class RidgeState {
 public:
  static constexpr std::size_t kRefreshInterval = 512;
  /// Quadratic forms in [-kNegativeTolerance, 0) are treated as round-off.
  static constexpr double kNegativeTolerance = 1e-12;

  RidgeState(int dim, double lambda);

  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  std::size_t count() const { return count_; }

  const Eigen::MatrixXd& precision() const { return precision_; }
  const Eigen::MatrixXd& precision_inv() const { return precision_inv_; }
  const Eigen::VectorXd& response_sum() const { return response_sum_; }
  const Eigen::VectorXd& estimate() const { return estimate_; }

  void update(const Eigen::Ref<const Eigen::VectorXd>& x, double reward);

  /// x^T theta_hat.
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// ||x||_{U^{-1}}. Throws kNumericalDegradation if the quadratic form is
  /// negative beyond tolerance; callers respond with refresh().
  double bonus(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Row-wise predict/bonus for a matrix whose rows are contexts.
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd bonus_rows(const Eigen::MatrixXd& rows) const;

  /// Rebuild U^{-1} (and the estimate) from U by direct factorization.
  void refresh();

  /// Max-abs entry of U * U^{-1} - I.
  double inverse_drift() const;

 private:
  int dim_;
  double lambda_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd precision_inv_;
  Eigen::VectorXd response_sum_;
  Eigen::VectorXd estimate_;
  std::size_t count_ = 0;
  std::size_t since_refresh_ = 0;
};

/// bonus_rows() with one automatic refresh on numerical degradation.
Eigen::VectorXd robust_bonus_rows(RidgeState& state, const Eigen::MatrixXd& rows);

}  // namespace bandit
