#include "bandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bandit/error.hpp"
#include "bandit/theory.hpp"

namespace bandit {
namespace {

/// Lowest index among maximizers.
Eigen::Index argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void require_arms(const Eigen::MatrixXd& arms, int dim) {
  if (arms.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty decision set");
  if (arms.cols() != dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "decision set has " + std::to_string(arms.cols()) + " columns, expected " + std::to_string(dim));
  }
}

bool same_choice(const ArmChoice& a, const ArmChoice& b) {
  return a.index == b.index && a.level == b.level && a.exit_reason == b.exit_reason &&
         a.selected_for_regression == b.selected_for_regression;
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOful: return "oful";
    case PolicyKind::kDsOful: return "ds_oful";
    case PolicyKind::kSupLinUcb: return "suplinucb";
    case PolicyKind::kLsw: return "lsw";
    case PolicyKind::kMabUcb: return "mab_ucb";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(const std::string& text) {
  for (PolicyKind k : {PolicyKind::kOful, PolicyKind::kDsOful, PolicyKind::kSupLinUcb, PolicyKind::kLsw,
                       PolicyKind::kMabUcb}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::kUcbArgmax: return "ucb-argmax";
    case ExitReason::kLargeUncertainty: return "large-uncertainty";
    case ExitReason::kDepthCap: return "depth-cap";
  }
  return "unknown";
}

// --- Policy -----------------------------------------------------------------

ArmChoice Policy::select(const Eigen::MatrixXd& arms, std::uint64_t version) {
  if (arms.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty decision set");
  ArmChoice choice = do_select(arms, version);
  pending_ = choice;
  return choice;
}

void Policy::observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  if (!pending_ || !same_choice(*pending_, choice)) {
    throw Error(ErrorCode::kProtocolViolation, "observe() without a matching select()");
  }
  pending_.reset();
  do_observe(choice, x, reward);
  ++round_;
}

// --- DS-OFUL ----------------------------------------------------------------

DsOfulPolicy::DsOfulPolicy(int dim, double lambda, double beta, double gamma, PolicyKind kind)
    : kind_(kind), ridge_(dim, lambda), beta_(beta), gamma_(kind == PolicyKind::kOful ? 0.0 : gamma) {
  if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (!(gamma_ >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
}

ArmChoice DsOfulPolicy::do_select(const Eigen::MatrixXd& arms, std::uint64_t version) {
  require_arms(arms, ridge_.dim());
  const bool reuse = version != 0 && version == cached_version_ && ridge_.count() == cached_count_ &&
                     cached_score_.size() == arms.rows();
  if (!reuse) {
    cached_bonus_ = robust_bonus_rows(ridge_, arms);
    cached_score_ = ridge_.predict_rows(arms) + beta_ * cached_bonus_;
    cached_version_ = version;
    cached_count_ = ridge_.count();
  }
  const Eigen::Index best = argmax(cached_score_);
  ArmChoice choice;
  choice.index = static_cast<std::size_t>(best);
  choice.score = cached_score_[best];
  choice.bonus_at_choice = cached_bonus_[best];
  choice.selected_for_regression = choice.bonus_at_choice >= gamma_;
  return choice;
}

void DsOfulPolicy::do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  if (choice.selected_for_regression) ridge_.update(x, reward);
}

// --- SupLinUCB --------------------------------------------------------------

SupLinUcbPolicy::SupLinUcbPolicy(int dim, const PolicyConfig& cfg) : dim_(dim), cfg_(cfg) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be > 0");
  if (cfg.level_beta == LevelBeta::kConstant && !(cfg.beta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  }
  if (cfg.level_beta == LevelBeta::kTheory) {
    // Validates the formula inputs up front.
    (void)theory::beta_level(1, dim, cfg.L, cfg.B, cfg.R, cfg.failure_prob);
  }
}

double SupLinUcbPolicy::beta_at(int level) const {
  if (cfg_.level_beta == LevelBeta::kConstant) return cfg_.beta;
  while (beta_cache_.size() < static_cast<std::size_t>(level)) {
    const int l = static_cast<int>(beta_cache_.size()) + 1;
    beta_cache_.push_back(theory::beta_level(l, dim_, cfg_.L, cfg_.B, cfg_.R, cfg_.failure_prob));
  }
  return beta_cache_[static_cast<std::size_t>(level - 1)];
}

RidgeState& SupLinUcbPolicy::level_state_mut(int level) {
  while (levels_.size() < static_cast<std::size_t>(level)) levels_.emplace_back(dim_, cfg_.lambda);
  return levels_[static_cast<std::size_t>(level - 1)];
}

std::size_t SupLinUcbPolicy::regression_count() const {
  std::size_t total = 0;
  for (const auto& s : levels_) total += s.count();
  return total;
}

std::vector<std::size_t> SupLinUcbPolicy::level_counts() const {
  std::vector<std::size_t> out;
  for (const auto& s : levels_) out.push_back(s.count());
  return out;
}

ArmChoice SupLinUcbPolicy::do_select(const Eigen::MatrixXd& arms, std::uint64_t /*version*/) {
  require_arms(arms, dim_);
  const double k = static_cast<double>(round() + 1);

  std::vector<std::size_t> active(static_cast<std::size_t>(arms.rows()));
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  ArmChoice choice;
  Eigen::MatrixXd sub;
  for (int level = 1;; ++level) {
    RidgeState& state = level_state_mut(level);
    const bool full = active.size() == static_cast<std::size_t>(arms.rows());
    if (!full) {
      sub.resize(static_cast<Eigen::Index>(active.size()), dim_);
      for (std::size_t i = 0; i < active.size(); ++i) {
        sub.row(static_cast<Eigen::Index>(i)) = arms.row(static_cast<Eigen::Index>(active[i]));
      }
    }
    const Eigen::MatrixXd& rows = full ? arms : sub;
    const Eigen::VectorXd bonus = robust_bonus_rows(state, rows);
    const double beta_l = beta_at(level);
    const Eigen::VectorXd score = state.predict_rows(rows) + beta_l * bonus;
    if (cfg_.record_active_sets) choice.active_sets.push_back(active);

    const double threshold = std::ldexp(1.0, -level);
    const Eigen::Index widest = argmax(bonus);
    if (bonus[widest] >= threshold) {
      choice.index = active[static_cast<std::size_t>(widest)];
      choice.score = score[widest];
      choice.bonus_at_choice = bonus[widest];
      choice.selected_for_regression = true;
      choice.level = level;
      choice.exit_reason = ExitReason::kLargeUncertainty;
      return choice;
    }

    const Eigen::Index best = argmax(score);
    const bool capped = level >= kMaxLevels;
    if (capped) ++anomalies_;
    if (k <= std::ldexp(static_cast<double>(dim_), 2 * level) || capped) {
      choice.index = active[static_cast<std::size_t>(best)];
      choice.score = score[best];
      choice.bonus_at_choice = bonus[best];
      choice.selected_for_regression = false;
      choice.level = level;
      choice.exit_reason = ExitReason::kDepthCap;
      return choice;
    }

    std::vector<ScoredArm> scored(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) scored[i] = {active[i], score[static_cast<Eigen::Index>(i)]};
    const std::vector<ScoredArm> kept = eliminate(scored, beta_l, level);
    active.clear();
    for (const auto& a : kept) active.push_back(a.index);
  }
}

void SupLinUcbPolicy::do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  if (choice.exit_reason == ExitReason::kLargeUncertainty) level_state_mut(choice.level).update(x, reward);
}

std::vector<ScoredArm> eliminate(std::span<const ScoredArm> arms, double beta_l, int level) {
  if (arms.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot eliminate from an empty set");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : arms) best = std::max(best, a.score);
  const double width = 2.0 * beta_l * std::ldexp(1.0, -level);
  std::vector<ScoredArm> kept;
  for (const auto& a : arms) {
    if (best - a.score <= width) kept.push_back(a);
  }
  return kept;
}

// --- LSW --------------------------------------------------------------------

LswPolicy::LswPolicy(int dim, double lambda, double beta, double eps_lsw)
    : dim_(dim), ridge_(dim, lambda), beta_(beta), eps_(eps_lsw) {
  if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (!(eps_lsw >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps_lsw must be >= 0");
}

ArmChoice LswPolicy::do_select(const Eigen::MatrixXd& arms, std::uint64_t /*version*/) {
  require_arms(arms, dim_);
  const Eigen::VectorXd bonus = robust_bonus_rows(ridge_, arms);
  Eigen::VectorXd score = ridge_.predict_rows(arms) + beta_ * bonus;
  if (history_count_ > 0) {
    // Recomputed from scratch every round: O(k d^2 + n k d).
    const Eigen::Map<const Eigen::MatrixXd> hist(history_.data(), dim_, static_cast<Eigen::Index>(history_count_));
    const Eigen::MatrixXd projected = ridge_.precision_inv() * hist;
    const Eigen::MatrixXd cross = arms * projected;
    score += eps_ * cross.cwiseAbs().rowwise().sum();
  }
  const Eigen::Index best = argmax(score);
  ArmChoice choice;
  choice.index = static_cast<std::size_t>(best);
  choice.score = score[best];
  choice.bonus_at_choice = bonus[best];
  choice.selected_for_regression = true;
  return choice;
}

void LswPolicy::do_observe(const ArmChoice& /*choice*/, const Eigen::Ref<const Eigen::VectorXd>& x, double reward) {
  ridge_.update(x, reward);
  history_.insert(history_.end(), x.data(), x.data() + dim_);
  ++history_count_;
}

// --- multi-armed UCB --------------------------------------------------------

MabUcbPolicy::MabUcbPolicy(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
}

std::size_t MabUcbPolicy::identify(const Eigen::Ref<const Eigen::VectorXd>& x) {
  for (std::size_t i = 0; i < contexts_.size(); ++i) {
    if (contexts_[i] == x) return i;
  }
  contexts_.emplace_back(x);
  counts_.push_back(0);
  means_.push_back(0.0);
  return contexts_.size() - 1;
}

ArmChoice MabUcbPolicy::do_select(const Eigen::MatrixXd& arms, std::uint64_t version) {
  require_arms(arms, dim_);
  if (version == 0 || version != mapped_version_ || row_to_arm_.size() != static_cast<std::size_t>(arms.rows())) {
    row_to_arm_.resize(static_cast<std::size_t>(arms.rows()));
    for (Eigen::Index r = 0; r < arms.rows(); ++r) row_to_arm_[static_cast<std::size_t>(r)] = identify(arms.row(r).transpose());
    mapped_version_ = version;
  }
  const double log_k = std::log(static_cast<double>(round() + 1));
  ArmChoice choice;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < row_to_arm_.size(); ++r) {
    const std::size_t a = row_to_arm_[r];
    const double width = counts_[a] == 0 ? std::numeric_limits<double>::infinity()
                                         : std::sqrt(2.0 * log_k / static_cast<double>(counts_[a]));
    const double index = counts_[a] == 0 ? width : means_[a] + width;
    if (index > best) {
      best = index;
      choice.index = r;
      choice.score = index;
      choice.bonus_at_choice = width;
    }
  }
  choice.selected_for_regression = true;
  return choice;
}

void MabUcbPolicy::do_observe(const ArmChoice& choice, const Eigen::Ref<const Eigen::VectorXd>& /*x*/, double reward) {
  const std::size_t a = row_to_arm_.at(choice.index);
  ++counts_[a];
  means_[a] += (reward - means_[a]) / static_cast<double>(counts_[a]);
  ++total_pulls_;
}

// --- factory ----------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, int dim) {
  switch (cfg.kind) {
    case PolicyKind::kOful:
    case PolicyKind::kDsOful:
      return std::make_unique<DsOfulPolicy>(dim, cfg.lambda, cfg.beta, cfg.gamma, cfg.kind);
    case PolicyKind::kSupLinUcb:
      return std::make_unique<SupLinUcbPolicy>(dim, cfg);
    case PolicyKind::kLsw:
      return std::make_unique<LswPolicy>(dim, cfg.lambda, cfg.beta, cfg.eps_lsw);
    case PolicyKind::kMabUcb:
      return std::make_unique<MabUcbPolicy>(dim);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown policy kind");
}

}  // namespace bandit
