#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bandit {

using Rng = std::mt19937_64;

/// Deterministic stream derived from (seed, stream id); distinct ids give
/// independent-looking streams for the same trial seed.
Rng make_stream(std::uint64_t seed, std::uint64_t stream_id);

enum class EnvKind { kSynthetic, kDataset, kHard };

const char* to_string(EnvKind kind);

/// Ground truth of one bandit instance. Immutable after construction.
struct EnvironmentSpec {
  EnvKind kind = EnvKind::kSynthetic;
  int dim = 0;
  Eigen::VectorXd theta_star;

  // Fixed arm set (synthetic, hard): one context per row.
  Eigen::MatrixXd contexts;
  std::vector<double> misspec;          // eta(x_i) = r(x_i) - x_i^T theta*
  std::vector<double> expected_reward;  // r(x_i)

  // Dataset family: candidate pools, one feature vector per row.
  Eigen::MatrixXd positives;
  Eigen::MatrixXd negatives;

  double zeta = 0.0;         // declared misspecification level
  double noise_scale = 1.0;  // R (Gaussian std)
  double L = 1.0;
  double B = 1.0;
  double gap = 0.0;          // minimal positive sub-optimality gap
  double reward_min = 0.0;   // effective range of expected rewards
  double reward_max = 0.0;

  bool fixed_arms() const { return kind != EnvKind::kDataset; }
  std::size_t n_arms() const { return static_cast<std::size_t>(contexts.rows()); }
  /// Largest |r(x) - x^T theta*| over the fixed arm set (or dataset pools).
  double max_abs_misspec() const;
};

/// One round's decision set. `arms` is all a policy may see; the rest is
/// ground truth reserved for regret accounting.
struct DecisionSet {
  Eigen::MatrixXd arms;                // one context per row
  std::vector<double> expected;        // r(x) per row
  std::vector<std::size_t> arm_ids;    // identity within the environment
  double best = 0.0;                   // r_k^*
  std::uint64_t version = 0;           // equal versions => identical sets

  std::size_t size() const { return static_cast<std::size_t>(arms.rows()); }
  /// Row indices attaining r_k^* exactly.
  std::vector<std::size_t> optimal_rows() const;
};

struct StepResult {
  double reward = 0.0;
  double inst_regret = 0.0;
};

/// Brute-force minimal strictly positive gap r* - r(x). Throws kGapUndefined
/// when every arm ties.
double min_gap(std::span<const double> rewards);
double min_gap(const EnvironmentSpec& env);

/// Synthetic misspecified family: Gaussian theta* and contexts normalized to
/// unit length, eta uniform on {-zeta, +zeta}, Gaussian reward noise.
EnvironmentSpec gen_synthetic(int dim, int n_contexts, double zeta, std::uint64_t seed,
                              double noise_scale = 1.0);

/// Unit vectors with all pairwise |<x_i, x_j>| <= epsilon (rows of the result),
/// built by rejection sampling of normalized Gaussian vectors.
Eigen::MatrixXd sparse_vector_set(int dim, int n, double epsilon, std::uint64_t seed,
                                  int max_attempts = 100000);

/// Parameter of the hard family. `peak` set => theta = delta*x_base + 2*delta*x_peak,
/// otherwise theta = delta*x_base.
struct HardParam {
  std::size_t base = 0;
  std::optional<std::size_t> peak;
  Eigen::VectorXd theta;
};

struct HardInstanceFamily {
  Eigen::MatrixXd arms;  // one unit vector per row
  std::vector<HardParam> params;
  double delta = 0.0;
  double epsilon = 0.0;
  double zeta = 0.0;  // 3 * delta * epsilon

  std::size_t n_arms() const { return static_cast<std::size_t>(arms.rows()); }
  /// Piecewise expected reward of `arm` under parameter `param`.
  double expected_reward(std::size_t param, std::size_t arm) const;
  /// Fixed-arm environment realizing parameter `param` with N(r, 1) rewards.
  EnvironmentSpec instance(std::size_t param) const;
};

HardInstanceFamily gen_hard_instance(int dim, int n_arms, double delta, std::uint64_t seed);

/// Dataset family from a feature file; keeps rows with |phi^T theta* - label| <= zeta_filter.
EnvironmentSpec dataset_env_load(const std::string& path, double zeta_filter);

/// Realized reward and ground-truth regret of pulling row `chosen`.
StepResult env_step(const EnvironmentSpec& env, const DecisionSet& set, std::size_t chosen,
                    Rng& noise);

/// Per-trial server of decision sets and rewards, with independent streams for
/// decision-set sampling and reward noise.
class Environment {
 public:
  Environment(std::shared_ptr<const EnvironmentSpec> spec, std::uint64_t trial_seed);

  const EnvironmentSpec& spec() const { return *spec_; }
  const DecisionSet& next_round();
  StepResult step(std::size_t chosen);

 private:
  std::shared_ptr<const EnvironmentSpec> spec_;
  DecisionSet current_;
  Rng sampler_;
  Rng noise_;
  std::uint64_t next_version_ = 1;
};

}  // namespace bandit
