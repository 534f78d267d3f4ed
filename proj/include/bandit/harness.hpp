#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bandit/config.hpp"
#include "bandit/environment.hpp"
#include "bandit/policy.hpp"

namespace bandit {

/// One concrete grid point of a PolicySpec.
struct PolicyVariant {
  std::string name;   // PolicySpec name
  std::string label;  // name plus the grid coordinates that vary
  PolicyKind kind = PolicyKind::kDsOful;
  ParamMode mode = ParamMode::kFixed;
  PolicyConfig config;

  /// "beta=..;lambda=..;gamma=.." (no commas, CSV-safe).
  std::string params() const;
};

std::vector<PolicyVariant> expand_grid(const PolicySpec& spec);

/// Resolves theory/heuristic modes against an instance.
PolicyConfig resolve_policy(const PolicyVariant& v, const EnvironmentSpec& env, double failure_prob);

struct RoundRecord {
  std::size_t round = 0;
  std::size_t arm = 0;  // environment arm id
  double reward = 0.0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  double bonus = 0.0;
  bool selected = false;
  int level = 0;
  double elapsed_s = 0.0;
};

struct AuditReport {
  bool admissible_ds = false;
  bool admissible_sup = false;
  std::size_t cap_checks = 0;
  std::size_t cap_violations = 0;
  std::size_t skipped_rounds_checked = 0;
  std::size_t skipped_round_violations = 0;
  std::size_t survival_checks = 0;
  std::size_t survival_violations = 0;
  std::size_t coverage_checks = 0;
  std::size_t coverage_violations = 0;  // informational: a 1 - delta event
  std::vector<std::string> messages;

  /// Hard violations (coverage is probabilistic and not counted).
  std::size_t violations() const { return cap_violations + skipped_round_violations + survival_violations; }
  void merge(const AuditReport& other);
};

struct RegretTrace {
  std::string policy;  // variant label
  std::string params;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;  // empty unless requested
  std::size_t horizon = 0;
  double final_regret = 0.0;
  double last_window_regret = 0.0;  // sum over the last min(K, 1000) rounds
  std::size_t selection_count = 0;
  std::vector<std::size_t> level_counts;
  double elapsed_s = 0.0;
  std::vector<std::size_t> arm_visits;  // fixed-arm environments
  AuditReport audit;
};

struct TrialOptions {
  std::size_t horizon = 1000;
  bool keep_rounds = true;
  AuditFlags audits = AuditFlags::none();
  double failure_prob = 0.1;
  std::size_t last_window = 1000;
};

/// Runs one (instance, policy, seed) interaction for `opts.horizon` rounds.
RegretTrace run_trial(std::shared_ptr<const EnvironmentSpec> env, const PolicyVariant& variant,
                      std::uint64_t seed, const TrialOptions& opts);

/// Builds the instance for trial `trial_index` of `cfg` (synthetic, dataset or
/// one hard-family parameter drawn from the trial seed).
std::shared_ptr<const EnvironmentSpec> build_environment(const ExperimentConfig& cfg, std::size_t trial_index);

/// Convenience: instance from the config, trial seed = base_seed + index.
RegretTrace run_trial(const ExperimentConfig& cfg, const PolicyVariant& variant, std::size_t trial_index);

struct SummaryRow {
  std::string policy;  // variant label
  std::string name;    // PolicySpec name
  std::string params;
  std::size_t trials = 0;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_last1k_regret = 0.0;
  double mean_elapsed_s = 0.0;
  double selection_count = 0.0;  // mean |C_K|
  bool failed = false;
  std::string error;
  std::vector<RegretTrace> traces;  // per trial, in seed order
  AuditReport audit;                // merged over trials
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  AuditReport audit;
  const SummaryRow* find(const std::string& label) const;
};

enum class Execution { kParallel, kSerial };

/// Runs every variant of every policy for every trial. Parallel execution
/// spreads (variant, trial) jobs over OpenMP threads; the serial path is the
/// reference the parallel one must match.
SummaryTable run_experiment(const ExperimentConfig& cfg, Execution exec = Execution::kParallel);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

struct GridResult {
  SummaryTable table;
  std::map<std::string, const SummaryRow*> winners;  // by PolicySpec name
};

/// Lowest mean final regret per policy name; ties go to the lexicographically
/// smallest (beta, lambda, gamma, eps_lsw).
GridResult grid_search(const ExperimentConfig& cfg, Execution exec = Execution::kParallel);
std::map<std::string, const SummaryRow*> pick_winners(const SummaryTable& table, const ExperimentConfig& cfg);

/// Expected fraction of the first `horizon` rounds that must return zero
/// expected reward on the hard family under a uniformly drawn parameter, for
/// a noiseless learner that never repeats an arm before its first non-zero
/// observation. Enumerates every parameter; every arm ordering when
/// n_arms <= 7, otherwise the identity ordering.
double zero_information_fraction(std::size_t n_arms, std::size_t horizon);

struct HardConfig {
  int d = 64;
  int arms = 32;
  double delta = 0.25;
  std::size_t horizon = 5;
  std::size_t draws = 64;
  std::uint64_t seed = 0;
  std::vector<PolicySpec> policies;  // empty: the linear policies plus MAB-UCB
};

struct HardResult {
  struct Row {
    std::string policy;
    double mean_regret = 0.0;
    double mean_zero_reward_fraction = 0.0;
    std::vector<double> regrets;
  };
  std::vector<Row> rows;
  double zero_information_fraction = 0.0;
  double lower_threshold = 0.0;  // 0.5 * delta * K * fraction
  double epsilon = 0.0;
  double zeta = 0.0;
};

std::vector<PolicySpec> default_hard_policies(double delta, int d);
HardResult run_hard_experiment(const HardConfig& cfg, Execution exec = Execution::kParallel);

}  // namespace bandit
