#include "bandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bandit/error.hpp"
#include "bandit/feature_file.hpp"

namespace bandit {
namespace {

Eigen::VectorXd gaussian_unit(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  } while (v.squaredNorm() == 0.0);
  return v / v.norm();
}

void fill_reward_range(EnvironmentSpec& env, std::span<const double> rewards) {
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  env.reward_min = *lo;
  env.reward_max = *hi;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x5eedu};
  return Rng(seq);
}

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kSynthetic: return "synthetic";
    case EnvKind::kDataset: return "dataset";
    case EnvKind::kHard: return "hard";
  }
  return "unknown";
}

double EnvironmentSpec::max_abs_misspec() const {
  double worst = 0.0;
  for (double eta : misspec) worst = std::max(worst, std::abs(eta));
  if (kind == EnvKind::kDataset) {
    for (Eigen::Index i = 0; i < positives.rows(); ++i) {
      worst = std::max(worst, std::abs(positives.row(i).dot(theta_star) - 1.0));
    }
    for (Eigen::Index i = 0; i < negatives.rows(); ++i) {
      worst = std::max(worst, std::abs(negatives.row(i).dot(theta_star)));
    }
  }
  return worst;
}

std::vector<std::size_t> DecisionSet::optimal_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] == best) rows.push_back(i);
  }
  return rows;
}

double min_gap(std::span<const double> rewards) {
  if (rewards.empty()) throw Error(ErrorCode::kGapUndefined, "empty reward set");
  const double best = *std::max_element(rewards.begin(), rewards.end());
  double gap = std::numeric_limits<double>::infinity();
  for (double r : rewards) {
    const double d = best - r;
    if (d > 0.0) gap = std::min(gap, d);
  }
  if (!std::isfinite(gap)) throw Error(ErrorCode::kGapUndefined, "all arms tie");
  return gap;
}

double min_gap(const EnvironmentSpec& env) {
  if (env.kind == EnvKind::kDataset) return 1.0;
  return min_gap(std::span<const double>(env.expected_reward));
}

EnvironmentSpec gen_synthetic(int dim, int n_contexts, double zeta, std::uint64_t seed,
                              double noise_scale) {
  if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "synthetic dim must be >= 2");
  if (n_contexts < 2) throw Error(ErrorCode::kInvalidArgument, "need >= 2 contexts for a gap");
  if (!(zeta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "zeta must be >= 0");
  if (!(noise_scale >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise scale must be >= 0");

  Rng rng = make_stream(seed, 0);
  EnvironmentSpec env;
  env.kind = EnvKind::kSynthetic;
  env.dim = dim;
  env.theta_star = gaussian_unit(dim, rng);
  env.contexts.resize(n_contexts, dim);
  for (int i = 0; i < n_contexts; ++i) env.contexts.row(i) = gaussian_unit(dim, rng).transpose();

  std::bernoulli_distribution coin(0.5);
  env.misspec.resize(n_contexts);
  env.expected_reward.resize(n_contexts);
  for (int i = 0; i < n_contexts; ++i) {
    env.misspec[i] = coin(rng) ? zeta : -zeta;
    env.expected_reward[i] = env.contexts.row(i).dot(env.theta_star) + env.misspec[i];
  }
  env.zeta = zeta;
  env.noise_scale = noise_scale;
  env.L = 1.0;
  env.B = 1.0;
  env.gap = min_gap(env);
  fill_reward_range(env, env.expected_reward);
  return env;
}

Eigen::MatrixXd sparse_vector_set(int dim, int n, double epsilon, std::uint64_t seed,
                                  int max_attempts) {
  if (dim < 1 || n < 1) throw Error(ErrorCode::kInvalidArgument, "dim and n must be >= 1");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  if (max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");

  Rng rng = make_stream(seed, 1);
  Eigen::MatrixXd out(n, dim);

  if (epsilon == 0.0) {
    // Exact orthogonality: Gram-Schmidt on Gaussian draws.
    if (n > dim) {
      throw Error(ErrorCode::kInvalidArgument, "more orthogonal vectors than dimensions");
    }
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v;
      do {
        v = gaussian_unit(dim, rng);
        for (int pass = 0; pass < 2; ++pass) {
          for (int j = 0; j < i; ++j) v -= out.row(j).dot(v) * out.row(j).transpose();
        }
      } while (v.norm() < 1e-6);
      out.row(i) = (v / v.norm()).transpose();
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        if (std::abs(out.row(i).dot(out.row(j))) > 1e-12) {
          throw Error(ErrorCode::kConstructionFailure, "re-orthogonalization failed");
        }
      }
    }
    return out;
  }

  const double required = std::ceil(8.0 * std::log(static_cast<double>(n)) / (epsilon * epsilon));
  if (static_cast<double>(dim) < required) {
    std::ostringstream msg;
    msg << "dim " << dim << " < ceil(8 log(n) / eps^2) = " << required;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }

  constexpr int kPerVectorTries = 1000;
  int best_placed = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    int placed = 0;
    while (placed < n) {
      bool accepted = false;
      for (int t = 0; t < kPerVectorTries && !accepted; ++t) {
        const Eigen::VectorXd v = gaussian_unit(dim, rng);
        double worst = 0.0;
        for (int j = 0; j < placed; ++j) worst = std::max(worst, std::abs(out.row(j).dot(v)));
        if (worst <= epsilon) {
          out.row(placed) = v.transpose();
          accepted = true;
        } else {
          tightest = std::min(tightest, worst);
        }
      }
      if (!accepted) break;
      ++placed;
    }
    if (placed == n) return out;
    best_placed = std::max(best_placed, placed);
  }
  std::ostringstream msg;
  msg << "placed at most " << best_placed << " of " << n
      << " vectors; tightest rejected pair |<x,y>| = " << tightest << " > " << epsilon;
  throw Error(ErrorCode::kConstructionFailure, msg.str());
}

double HardInstanceFamily::expected_reward(std::size_t param, std::size_t arm) const {
  const HardParam& p = params.at(param);
  if (arm >= n_arms()) throw Error(ErrorCode::kInvalidArgument, "arm index out of range");
  if (p.peak && arm == *p.peak) return 2.0 * delta;
  if (arm == p.base) return delta;
  return 0.0;
}

EnvironmentSpec HardInstanceFamily::instance(std::size_t param) const {
  if (param >= params.size()) throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
  EnvironmentSpec env;
  env.kind = EnvKind::kHard;
  env.dim = static_cast<int>(arms.cols());
  env.theta_star = params[param].theta;
  env.contexts = arms;
  env.misspec.resize(n_arms());
  env.expected_reward.resize(n_arms());
  for (std::size_t a = 0; a < n_arms(); ++a) {
    env.expected_reward[a] = expected_reward(param, a);
    env.misspec[a] = env.expected_reward[a] - arms.row(static_cast<Eigen::Index>(a)).dot(env.theta_star);
  }
  env.zeta = zeta;
  env.noise_scale = 1.0;
  env.L = 1.0;
  env.B = 1.0;
  env.gap = min_gap(env);
  fill_reward_range(env, env.expected_reward);
  return env;
}

HardInstanceFamily gen_hard_instance(int dim, int n_arms, double delta, std::uint64_t seed) {
  if (!(delta > 0.0) || delta > 1.0) throw Error(ErrorCode::kInvalidArgument, "delta must be in (0, 1]");
  if (dim < 2 || n_arms < 2) throw Error(ErrorCode::kInvalidArgument, "need dim >= 2 and >= 2 arms");

  HardInstanceFamily fam;
  fam.delta = delta;
  fam.epsilon = std::sqrt(8.0 * std::log(static_cast<double>(n_arms)) / (dim - 1));
  fam.zeta = 3.0 * delta * fam.epsilon;
  fam.arms = sparse_vector_set(dim, n_arms, fam.epsilon, seed);

  const auto n = static_cast<std::size_t>(n_arms);
  fam.params.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      HardParam p;
      p.base = i;
      p.peak = j;
      p.theta = delta * fam.arms.row(static_cast<Eigen::Index>(i)).transpose() +
                2.0 * delta * fam.arms.row(static_cast<Eigen::Index>(j)).transpose();
      fam.params.push_back(std::move(p));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    HardParam p;
    p.base = i;
    p.theta = delta * fam.arms.row(static_cast<Eigen::Index>(i)).transpose();
    fam.params.push_back(std::move(p));
  }

  // Certificate: the linear model is off by at most 3*delta*eps everywhere.
  const double bound = fam.zeta * (1.0 + 1e-12);
  for (std::size_t p = 0; p < fam.params.size(); ++p) {
    const Eigen::VectorXd lin = fam.arms * fam.params[p].theta;
    for (std::size_t a = 0; a < n; ++a) {
      if (std::abs(fam.expected_reward(p, a) - lin[static_cast<Eigen::Index>(a)]) > bound) {
        throw Error(ErrorCode::kConstructionFailure, "misspecification certificate violated");
      }
    }
  }
  return fam;
}

EnvironmentSpec dataset_env_load(const std::string& path, double zeta_filter) {
  if (!(zeta_filter >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "zeta filter must be >= 0");
  const FeatureFile file = read_feature_file(path);
  const Eigen::VectorXd theta = file.theta_star ? *file.theta_star : fit_least_squares(file);

  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < file.features.rows(); ++i) {
    const int label = file.labels[static_cast<std::size_t>(i)];
    if (std::abs(file.features.row(i).dot(theta) - label) <= zeta_filter) {
      (label == 1 ? pos : neg).push_back(i);
    }
  }
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::kEmptyClass, "filter at zeta=" + std::to_string(zeta_filter) +
                                            " leaves " + std::to_string(pos.size()) + " positive and " +
                                            std::to_string(neg.size()) + " negative rows");
  }

  EnvironmentSpec env;
  env.kind = EnvKind::kDataset;
  env.dim = file.dim;
  env.theta_star = theta;
  env.positives.resize(static_cast<Eigen::Index>(pos.size()), file.dim);
  env.negatives.resize(static_cast<Eigen::Index>(neg.size()), file.dim);
  for (std::size_t i = 0; i < pos.size(); ++i) env.positives.row(static_cast<Eigen::Index>(i)) = file.features.row(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) env.negatives.row(static_cast<Eigen::Index>(i)) = file.features.row(neg[i]);
  env.noise_scale = 0.0;
  env.L = 1.0;
  env.B = std::max(1.0, theta.norm());
  env.gap = 1.0;
  env.reward_min = 0.0;
  env.reward_max = 1.0;
  env.zeta = std::isfinite(zeta_filter) ? zeta_filter : env.max_abs_misspec();
  return env;
}

StepResult env_step(const EnvironmentSpec& env, const DecisionSet& set, std::size_t chosen, Rng& noise) {
  if (chosen >= set.size()) {
    throw Error(ErrorCode::kInvalidArgument, "chosen arm " + std::to_string(chosen) + " out of range");
  }
  StepResult out;
  const double mean = set.expected[chosen];
  out.reward = mean;
  if (env.noise_scale > 0.0) {
    std::normal_distribution<double> normal(0.0, env.noise_scale);
    out.reward += normal(noise);
  }
  out.inst_regret = set.best - mean;
  return out;
}

Environment::Environment(std::shared_ptr<const EnvironmentSpec> spec, std::uint64_t trial_seed)
    : spec_(std::move(spec)), sampler_(make_stream(trial_seed, 10)), noise_(make_stream(trial_seed, 11)) {
  if (spec_->fixed_arms()) {
    current_.arms = spec_->contexts;
    current_.expected = spec_->expected_reward;
    current_.arm_ids.resize(spec_->n_arms());
    for (std::size_t i = 0; i < current_.arm_ids.size(); ++i) current_.arm_ids[i] = i;
    current_.best = *std::max_element(current_.expected.begin(), current_.expected.end());
    current_.version = next_version_;
  } else {
    current_.arms.resize(2, spec_->dim);
    current_.expected.assign(2, 0.0);
    current_.arm_ids.assign(2, 0);
    current_.best = 1.0;
  }
}

const DecisionSet& Environment::next_round() {
  if (spec_->fixed_arms()) return current_;

  const EnvironmentSpec& env = *spec_;
  std::uniform_int_distribution<Eigen::Index> pick_pos(0, env.positives.rows() - 1);
  std::uniform_int_distribution<Eigen::Index> pick_neg(0, env.negatives.rows() - 1);
  std::bernoulli_distribution coin(0.5);
  const Eigen::Index p = pick_pos(sampler_);
  const Eigen::Index q = pick_neg(sampler_);
  // Random row order so lowest-index tie-breaking carries no label information.
  const Eigen::Index pos_row = coin(sampler_) ? 0 : 1;
  const Eigen::Index neg_row = 1 - pos_row;
  current_.arms.row(pos_row) = env.positives.row(p);
  current_.arms.row(neg_row) = env.negatives.row(q);
  current_.expected[static_cast<std::size_t>(pos_row)] = 1.0;
  current_.expected[static_cast<std::size_t>(neg_row)] = 0.0;
  // Identity: positives are [0, P), negatives [P, P + N).
  current_.arm_ids[static_cast<std::size_t>(pos_row)] = static_cast<std::size_t>(p);
  current_.arm_ids[static_cast<std::size_t>(neg_row)] = static_cast<std::size_t>(env.positives.rows() + q);
  current_.best = 1.0;
  current_.version = ++next_version_;
  return current_;
}

StepResult Environment::step(std::size_t chosen) { return env_step(*spec_, current_, chosen, noise_); }

}  // namespace bandit
