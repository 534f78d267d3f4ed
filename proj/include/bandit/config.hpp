#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bandit/environment.hpp"
#include "bandit/policy.hpp"

namespace bandit {

/// Instance with gap ~0.18 under the default synthetic arguments
/// (d=16, N=100, zeta=0.02); see configs/synthetic.conf.
inline constexpr std::uint64_t kDefaultSyntheticSeed = 56;

struct EnvConfig {
  EnvKind kind = EnvKind::kSynthetic;
  int d = 16;
  int n = 100;
  double zeta = 0.02;  // synthetic: eta level; dataset: row filter
  std::uint64_t seed = kDefaultSyntheticSeed;
  double noise = 1.0;
  bool resample = false;  // draw a fresh instance per trial (seed + trial index)
  std::string path;       // dataset feature file
  int arms = 32;          // hard family size
  double delta = 0.25;    // hard family gap
  std::size_t draws = 64; // hard family parameter draws
};

/// How a policy's hyperparameters are resolved against the instance.
enum class ParamMode {
  kFixed,      // grid values as given
  kTheory,     // lambda = B^-2, gamma and beta from the single-level theory
  kHeuristic,  // gamma = gap / sqrt(d), beta and lambda from the grid
};

const char* to_string(ParamMode mode);

/// One named policy with hyperparameter grids (a single value = no grid).
struct PolicySpec {
  std::string name;
  PolicyKind kind = PolicyKind::kDsOful;
  std::vector<double> gamma{0.0};
  std::vector<double> beta{1.0};
  std::vector<double> lambda{1.0};
  std::vector<double> eps_lsw{0.0};
  ParamMode mode = ParamMode::kFixed;
  LevelBeta level_beta = LevelBeta::kTheory;
  double failure_prob = 0.1;
};

struct AuditFlags {
  bool selection_cap = true;
  bool coverage = false;
  bool skipped_round = true;
  bool arm_survival = true;

  bool any() const { return selection_cap || coverage || skipped_round || arm_survival; }
  static AuditFlags none() { return {false, false, false, false}; }
};

struct ExperimentConfig {
  EnvConfig env;
  std::vector<PolicySpec> policies;
  std::size_t horizon = 10000;
  std::size_t trials = 8;
  std::uint64_t base_seed = 0;
  AuditFlags audits;
  std::string output_dir;
  int threads = 0;             // 0: OpenMP default
  double failure_prob = 0.1;   // delta for theory-mode parameters and audits

  /// Throws kInvalidConfig on broken invariants.
  void validate() const;
};

/// The synthetic reproduction policy set: OFUL, DS-OFUL at several
/// thresholds and SupLinUCB, each over beta x lambda in {1,3,10}^2.
std::vector<PolicySpec> default_policies();

/// Parses the flat `key = value` format (`#` starts a comment). Lists are
/// comma separated. Unset keys keep their defaults; with no policy keys the
/// default policy set is used.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace bandit
