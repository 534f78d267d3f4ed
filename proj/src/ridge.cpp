#include "bandit/ridge.hpp"

#include <cmath>
#include <string>

#include "bandit/error.hpp"

namespace bandit {
namespace {

void check_dim(const RidgeState& s, Eigen::Index n) {
  if (n != s.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "context has length " + std::to_string(n) + ", expected " + std::to_string(s.dim()));
  }
}

double checked_root(double q) {
  if (q < 0.0) {
    if (q < -RidgeState::kNegativeTolerance) {
      throw Error(ErrorCode::kNumericalDegradation,
                  "negative quadratic form " + std::to_string(q));
    }
    return 0.0;
  }
  return std::sqrt(q);
}

}  // namespace

RidgeState::RidgeState(int dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "ridge dimension must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge regularizer must be positive");
  }
  precision_ = Eigen::MatrixXd::Identity(dim, dim) * lambda;
  precision_inv_ = Eigen::MatrixXd::Identity(dim, dim) / lambda;
  response_sum_ = Eigen::VectorXd::Zero(dim);
  estimate_ = Eigen::VectorXd::Zero(dim);
}

void RidgeState::update(const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  check_dim(*this, x.size());
  if (!x.allFinite() || !std::isfinite(reward)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite context or reward");
  }
  ++count_;
  if (x.squaredNorm() == 0.0) return;

  precision_.noalias() += x * x.transpose();
  response_sum_.noalias() += reward * x;

  if (++since_refresh_ >= kRefreshInterval) {
    refresh();
    return;
  }
  // Sherman-Morrison: (U + x x^T)^{-1} = U^{-1} - (U^{-1}x)(U^{-1}x)^T / (1 + x^T U^{-1} x)
  const Eigen::VectorXd ux = precision_inv_ * x;
  const double denom = 1.0 + x.dot(ux);
  precision_inv_.noalias() -= (ux * ux.transpose()) / denom;
  estimate_.noalias() = precision_inv_ * response_sum_;
}

double RidgeState::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(*this, x.size());
  return x.dot(estimate_);
}

double RidgeState::bonus(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(*this, x.size());
  return checked_root(x.dot(precision_inv_ * x));
}

Eigen::VectorXd RidgeState::predict_rows(const Eigen::MatrixXd& rows) const {
  check_dim(*this, rows.cols());
  return rows * estimate_;
}

Eigen::VectorXd RidgeState::bonus_rows(const Eigen::MatrixXd& rows) const {
  check_dim(*this, rows.cols());
  const Eigen::MatrixXd projected = rows * precision_inv_;
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out[i] = checked_root(projected.row(i).dot(rows.row(i)));
  }
  return out;
}

void RidgeState::refresh() {
  const Eigen::LLT<Eigen::MatrixXd> llt(precision_);
  precision_inv_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
  precision_inv_ = 0.5 * (precision_inv_ + precision_inv_.transpose()).eval();
  estimate_.noalias() = precision_inv_ * response_sum_;
  since_refresh_ = 0;
}

double RidgeState::inverse_drift() const {
  return (precision_ * precision_inv_ - Eigen::MatrixXd::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
}

Eigen::VectorXd robust_bonus_rows(RidgeState& state, const Eigen::MatrixXd& rows) {
  try {
    return state.bonus_rows(rows);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumericalDegradation) throw;
    state.refresh();
    return state.bonus_rows(rows);
  }
}

}  // namespace bandit
