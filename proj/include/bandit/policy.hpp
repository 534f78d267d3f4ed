#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bandit/ridge.hpp"

namespace bandit {

enum class PolicyKind { kOful, kDsOful, kSupLinUcb, kLsw, kMabUcb };

const char* to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(const std::string& text);

enum class ExitReason { kUcbArgmax, kLargeUncertainty, kDepthCap };

const char* to_string(ExitReason reason);

/// How SupLinUCB sets its per-level confidence radius.
enum class LevelBeta {
  kTheory,    // beta(l) = 1 + R sqrt(2 d iota2(l))
  kConstant,  // beta(l) = PolicyConfig::beta at every level
};

struct ArmChoice {
  std::size_t index = 0;
  double score = 0.0;
  double bonus_at_choice = 0.0;
  bool selected_for_regression = false;
  int level = 0;
  ExitReason exit_reason = ExitReason::kUcbArgmax;
  /// SupLinUCB with recording on: decision-set rows alive at each visited level.
  std::vector<std::vector<std::size_t>> active_sets;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kDsOful;
  double lambda = 1.0;
  double beta = 1.0;
  double gamma = 0.0;    // DS-OFUL selection threshold
  double eps_lsw = 0.0;  // LSW correction weight

  LevelBeta level_beta = LevelBeta::kTheory;
  // Inputs of the per-level radius formula.
  double L = 1.0;
  double B = 1.0;
  double R = 1.0;
  double failure_prob = 0.1;

  bool record_active_sets = false;
};

/// Sequential decision rule. Callers alternate select() and observe(); the
/// policy only ever sees contexts and realized rewards.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const = 0;

  /// `version` identifies the decision set: equal non-zero versions promise
  /// identical rows, which lets policies reuse cached scores.
  ArmChoice select(const Eigen::MatrixXd& arms, std::uint64_t version = 0);

  /// Throws kProtocolViolation unless `choice` is the pending select() result.
  void observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward);

  std::size_t round() const { return round_; }

  /// |C_K| (summed over levels for SupLinUCB).
  virtual std::size_t regression_count() const = 0;
  /// |C_K^l| for l = 1, 2, ... (a single entry for one-level policies).
  virtual std::vector<std::size_t> level_counts() const { return {regression_count()}; }
  /// The one regression state of single-level policies, for audits.
  virtual const RidgeState* regression_state() const { return nullptr; }

 protected:
  virtual ArmChoice do_select(const Eigen::MatrixXd& arms, std::uint64_t version) = 0;
  virtual void do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) = 0;

 private:
  std::size_t round_ = 0;  // rounds completed
  std::optional<ArmChoice> pending_;
};

/// OFUL (gamma = 0) and data-selection OFUL.
class DsOfulPolicy final : public Policy {
 public:
  DsOfulPolicy(int dim, double lambda, double beta, double gamma, PolicyKind kind = PolicyKind::kDsOful);

  PolicyKind kind() const override { return kind_; }
  std::size_t regression_count() const override { return ridge_.count(); }
  const RidgeState* regression_state() const override { return &ridge_; }
  double gamma() const { return gamma_; }

 protected:
  ArmChoice do_select(const Eigen::MatrixXd& arms, std::uint64_t version) override;
  void do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) override;

 private:
  PolicyKind kind_;
  RidgeState ridge_;
  double beta_;
  double gamma_;
  // Scores are a pure function of (ridge state, decision set).
  std::uint64_t cached_version_ = 0;
  std::size_t cached_count_ = 0;
  Eigen::VectorXd cached_bonus_;
  Eigen::VectorXd cached_score_;
};

/// Multi-level arm elimination with per-level data selection.
class SupLinUcbPolicy final : public Policy {
 public:
  static constexpr int kMaxLevels = 64;

  SupLinUcbPolicy(int dim, const PolicyConfig& cfg);

  PolicyKind kind() const override { return PolicyKind::kSupLinUcb; }
  std::size_t regression_count() const override;
  std::vector<std::size_t> level_counts() const override;

  double beta_at(int level) const;
  /// Level states allocated so far (lazily, on first visit).
  std::size_t allocated_levels() const { return levels_.size(); }
  const RidgeState& level_state(int level) const { return levels_.at(static_cast<std::size_t>(level - 1)); }
  std::size_t anomalies() const { return anomalies_; }

 protected:
  ArmChoice do_select(const Eigen::MatrixXd& arms, std::uint64_t version) override;
  void do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) override;

 private:
  RidgeState& level_state_mut(int level);

  int dim_;
  PolicyConfig cfg_;
  std::vector<RidgeState> levels_;
  mutable std::vector<double> beta_cache_;
  std::size_t anomalies_ = 0;
};

/// OFUL plus the eps * sum_s |x^T U^{-1} x_s| correction over every past context.
class LswPolicy final : public Policy {
 public:
  LswPolicy(int dim, double lambda, double beta, double eps_lsw);

  PolicyKind kind() const override { return PolicyKind::kLsw; }
  std::size_t regression_count() const override { return ridge_.count(); }
  const RidgeState* regression_state() const override { return &ridge_; }
  std::size_t history_size() const { return history_count_; }

 protected:
  ArmChoice do_select(const Eigen::MatrixXd& arms, std::uint64_t version) override;
  void do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) override;

 private:
  int dim_;
  RidgeState ridge_;
  double beta_;
  double eps_;
  std::vector<double> history_;  // column-major d x history_count_
  std::size_t history_count_ = 0;
};

/// UCB1 over arms identified by exact context equality.
class MabUcbPolicy final : public Policy {
 public:
  explicit MabUcbPolicy(int dim);

  PolicyKind kind() const override { return PolicyKind::kMabUcb; }
  std::size_t regression_count() const override { return total_pulls_; }
  std::size_t arms_seen() const { return contexts_.size(); }

 protected:
  ArmChoice do_select(const Eigen::MatrixXd& arms, std::uint64_t version) override;
  void do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) override;

 private:
  std::size_t identify(const Eigen::Ref<const Eigen::VectorXd>& x);

  int dim_;
  std::vector<Eigen::VectorXd> contexts_;
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  std::uint64_t mapped_version_ = 0;
  std::vector<std::size_t> row_to_arm_;
  std::size_t total_pulls_ = 0;
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, int dim);

/// An arm carrying its level-l optimistic score.
struct ScoredArm {
  std::size_t index = 0;
  double score = 0.0;
};

/// Keeps the arms whose score is within 2 beta_l 2^-level of the best.
std::vector<ScoredArm> eliminate(std::span<const ScoredArm> arms, double beta_l, int level);

}  // namespace bandit
