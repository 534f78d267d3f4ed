#include "bandit/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "bandit/error.hpp"
#include "bandit/theory.hpp"

namespace bandit {
namespace {

using Clock = std::chrono::steady_clock;

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool is_theory_lambda(double lambda, double B) { return std::abs(lambda * B * B - 1.0) <= 1e-12; }

double declared_noise(const EnvironmentSpec& env) { return env.noise_scale > 0.0 ? env.noise_scale : 1.0; }

auto grid_key(const PolicyConfig& c) { return std::make_tuple(c.beta, c.lambda, c.gamma, c.eps_lsw); }

}  // namespace

// --- variants ---------------------------------------------------------------

std::string PolicyVariant::params() const {
  std::ostringstream os;
  os << "beta=" << format_value(config.beta) << ";lambda=" << format_value(config.lambda)
     << ";gamma=" << format_value(config.gamma);
  if (kind == PolicyKind::kLsw) os << ";eps_lsw=" << format_value(config.eps_lsw);
  if (mode != ParamMode::kFixed) os << ";mode=" << to_string(mode);
  if (kind == PolicyKind::kSupLinUcb) {
    os << ";level_beta=" << (config.level_beta == LevelBeta::kTheory ? "theory" : "constant");
  }
  return os.str();
}

std::vector<PolicyVariant> expand_grid(const PolicySpec& spec) {
  std::vector<PolicyVariant> out;
  for (double beta : spec.beta) {
    for (double lambda : spec.lambda) {
      for (double gamma : spec.gamma) {
        for (double eps : spec.eps_lsw) {
          PolicyVariant v;
          v.name = spec.name;
          v.kind = spec.kind;
          v.mode = spec.mode;
          v.config.kind = spec.kind;
          v.config.beta = beta;
          v.config.lambda = lambda;
          v.config.gamma = gamma;
          v.config.eps_lsw = eps;
          v.config.level_beta = spec.level_beta;
          v.config.failure_prob = spec.failure_prob;
          std::string label = spec.name;
          if (spec.beta.size() > 1) label += "_beta=" + format_value(beta);
          if (spec.lambda.size() > 1) label += "_lambda=" + format_value(lambda);
          if (spec.gamma.size() > 1) label += "_gamma=" + format_value(gamma);
          if (spec.eps_lsw.size() > 1) label += "_eps=" + format_value(eps);
          v.label = label;
          out.push_back(std::move(v));
        }
      }
    }
  }
  return out;
}

PolicyConfig resolve_policy(const PolicyVariant& v, const EnvironmentSpec& env, double failure_prob) {
  PolicyConfig c = v.config;
  c.L = env.L;
  c.B = env.B;
  c.R = declared_noise(env);
  if (v.mode == ParamMode::kTheory) {
    c.failure_prob = failure_prob;
    c.lambda = 1.0 / (env.B * env.B);
    if (v.kind == PolicyKind::kSupLinUcb) {
      c.level_beta = LevelBeta::kTheory;
    } else if (v.kind != PolicyKind::kMabUcb) {
      const auto p = theory::compute_single_level_params(env.dim, env.gap, env.L, env.B, c.R, failure_prob);
      c.beta = p.beta;
      c.gamma = v.kind == PolicyKind::kDsOful ? p.gamma : 0.0;
    }
  } else if (v.mode == ParamMode::kHeuristic && v.kind == PolicyKind::kDsOful) {
    c.gamma = theory::heuristic_gamma(env.dim, env.gap);
  }
  return c;
}

// --- audits -----------------------------------------------------------------

void AuditReport::merge(const AuditReport& o) {
  admissible_ds = admissible_ds || o.admissible_ds;
  admissible_sup = admissible_sup || o.admissible_sup;
  cap_checks += o.cap_checks;
  cap_violations += o.cap_violations;
  skipped_rounds_checked += o.skipped_rounds_checked;
  skipped_round_violations += o.skipped_round_violations;
  survival_checks += o.survival_checks;
  survival_violations += o.survival_violations;
  coverage_checks += o.coverage_checks;
  coverage_violations += o.coverage_violations;
  messages.insert(messages.end(), o.messages.begin(), o.messages.end());
}

// --- trials -----------------------------------------------------------------

RegretTrace run_trial(std::shared_ptr<const EnvironmentSpec> env_ptr, const PolicyVariant& variant,
                      std::uint64_t seed, const TrialOptions& opts) {
  const EnvironmentSpec& env = *env_ptr;
  if (variant.kind == PolicyKind::kMabUcb && !env.fixed_arms()) {
    throw Error(ErrorCode::kInvalidCombination, "mab_ucb needs a fixed arm set");
  }
  if (opts.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");

  PolicyConfig pcfg = resolve_policy(variant, env, opts.failure_prob);

  // Audit preconditions from the ground truth.
  AuditReport audit;
  std::optional<theory::Params> th;
  if (opts.audits.any()) {
    try {
      th = theory::compute_all({env.dim, env.gap, env.zeta, env.L, env.B, declared_noise(env), opts.failure_prob});
      audit.admissible_ds = th->admissible_ds;
      audit.admissible_sup = th->admissible_sup;
    } catch (const Error&) {
      th.reset();
    }
  }
  const bool theory_lambda = is_theory_lambda(pcfg.lambda, env.B);
  const bool audit_skipped = th && opts.audits.skipped_round && variant.kind == PolicyKind::kDsOful &&
                             variant.mode == ParamMode::kTheory && th->admissible_ds;
  const bool audit_survival = th && opts.audits.arm_survival && variant.kind == PolicyKind::kSupLinUcb &&
                              pcfg.level_beta == LevelBeta::kTheory && theory_lambda && th->admissible_sup;
  const bool audit_coverage = opts.audits.coverage && theory_lambda &&
                              (variant.kind == PolicyKind::kOful || variant.kind == PolicyKind::kDsOful ||
                               variant.kind == PolicyKind::kLsw);
  pcfg.record_active_sets = audit_survival;

  auto policy = make_policy(pcfg, env.dim);
  Environment environment(env_ptr, seed);

  RegretTrace trace;
  trace.policy = variant.label;
  trace.params = variant.params();
  trace.seed = seed;
  trace.horizon = opts.horizon;
  if (opts.keep_rounds) trace.rounds.reserve(opts.horizon);
  if (env.fixed_arms()) trace.arm_visits.assign(env.n_arms(), 0);

  const std::size_t window_start = opts.horizon > opts.last_window ? opts.horizon - opts.last_window : 0;
  const double R = declared_noise(env);
  double cum = 0.0;
  double elapsed = 0.0;
  for (std::size_t k = 1; k <= opts.horizon; ++k) {
    const auto t0 = Clock::now();
    const DecisionSet& set = environment.next_round();
    const ArmChoice choice = policy->select(set.arms, set.version);

    if (audit_coverage) {
      const RidgeState* ridge = policy->regression_state();
      const double c = static_cast<double>(ridge->count());
      const double iota = std::log((env.dim + c * env.L * env.L * env.B * env.B) / (env.dim * opts.failure_prob));
      const double radius = 1.0 + R * std::sqrt(2.0 * env.dim * iota) + env.zeta * std::sqrt(c);
      const Eigen::VectorXd err = set.arms * (ridge->estimate() - env.theta_star);
      const Eigen::VectorXd width = ridge->bonus_rows(set.arms);
      ++audit.coverage_checks;
      if ((err.cwiseAbs().array() > radius * width.array() + 1e-12).any()) ++audit.coverage_violations;
    }

    const StepResult step = environment.step(choice.index);
    policy->observe(choice, set.arms.row(static_cast<Eigen::Index>(choice.index)).transpose(), step.reward);
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    elapsed += dt;

    cum += step.inst_regret;
    if (k > window_start) trace.last_window_regret += step.inst_regret;
    const std::size_t arm_id = set.arm_ids[choice.index];
    if (env.fixed_arms()) ++trace.arm_visits[arm_id];

    if (audit_skipped && !choice.selected_for_regression) {
      ++audit.skipped_rounds_checked;
      if (step.inst_regret != 0.0) {
        ++audit.skipped_round_violations;
        if (audit.messages.size() < 8) {
          audit.messages.push_back(variant.label + " seed " + std::to_string(seed) + " round " + std::to_string(k) +
                                   ": skipped round with regret " + std::to_string(step.inst_regret));
        }
      }
    }
    if (audit_survival) {
      const auto optimal = set.optimal_rows();
      for (std::size_t l = 0; l < choice.active_sets.size() && static_cast<int>(l) + 1 <= th->l_delta; ++l) {
        const auto& active = choice.active_sets[l];
        ++audit.survival_checks;
        const bool present = std::any_of(optimal.begin(), optimal.end(), [&](std::size_t o) {
          return std::find(active.begin(), active.end(), o) != active.end();
        });
        if (!present) {
          ++audit.survival_violations;
          if (audit.messages.size() < 8) {
            audit.messages.push_back(variant.label + " seed " + std::to_string(seed) + " round " + std::to_string(k) +
                                     ": optimal arm eliminated before level " + std::to_string(l + 1));
          }
        }
      }
    }

    if (opts.keep_rounds) {
      RoundRecord rec;
      rec.round = k;
      rec.arm = arm_id;
      rec.reward = step.reward;
      rec.inst_regret = step.inst_regret;
      rec.cum_regret = cum;
      rec.bonus = choice.bonus_at_choice;
      rec.selected = choice.selected_for_regression;
      rec.level = choice.level;
      rec.elapsed_s = dt;
      trace.rounds.push_back(rec);
    }
  }
  trace.final_regret = cum;
  trace.elapsed_s = elapsed;
  trace.selection_count = policy->regression_count();
  trace.level_counts = policy->level_counts();

  if (opts.audits.selection_cap && theory_lambda) {
    if (variant.kind == PolicyKind::kDsOful && pcfg.gamma > 0.0 && pcfg.gamma <= 1.0) {
      const double cap = 16.0 * env.dim * std::log(3.0 * env.L * env.B / pcfg.gamma) / (pcfg.gamma * pcfg.gamma);
      ++audit.cap_checks;
      if (static_cast<double>(trace.selection_count) > cap) {
        ++audit.cap_violations;
        audit.messages.push_back(variant.label + ": |C_K| = " + std::to_string(trace.selection_count) +
                                 " exceeds cap " + std::to_string(cap));
      }
    }
    if (variant.kind == PolicyKind::kSupLinUcb) {
      for (std::size_t l = 0; l < trace.level_counts.size(); ++l) {
        const double two_l = std::ldexp(1.0, static_cast<int>(l) + 1);
        const double cap = 16.0 * env.dim * two_l * two_l * std::log(3.0 * env.L * env.B * two_l);
        ++audit.cap_checks;
        if (static_cast<double>(trace.level_counts[l]) > cap) {
          ++audit.cap_violations;
          audit.messages.push_back(variant.label + ": level " + std::to_string(l + 1) + " count exceeds cap");
        }
      }
    }
  }
  trace.audit = std::move(audit);
  return trace;
}

std::shared_ptr<const EnvironmentSpec> build_environment(const ExperimentConfig& cfg, std::size_t trial_index) {
  const EnvConfig& e = cfg.env;
  switch (e.kind) {
    case EnvKind::kSynthetic: {
      const std::uint64_t seed = e.resample ? e.seed + trial_index : e.seed;
      return std::make_shared<const EnvironmentSpec>(gen_synthetic(e.d, e.n, e.zeta, seed, e.noise));
    }
    case EnvKind::kDataset:
      return std::make_shared<const EnvironmentSpec>(dataset_env_load(e.path, e.zeta));
    case EnvKind::kHard: {
      const HardInstanceFamily fam = gen_hard_instance(e.d, e.arms, e.delta, e.seed);
      Rng rng = make_stream(cfg.base_seed + trial_index, 20);
      std::uniform_int_distribution<std::size_t> pick(0, fam.params.size() - 1);
      return std::make_shared<const EnvironmentSpec>(fam.instance(pick(rng)));
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown environment kind");
}

RegretTrace run_trial(const ExperimentConfig& cfg, const PolicyVariant& variant, std::size_t trial_index) {
  TrialOptions opts;
  opts.horizon = cfg.horizon;
  opts.audits = cfg.audits;
  opts.failure_prob = cfg.failure_prob;
  opts.keep_rounds = true;
  return run_trial(build_environment(cfg, trial_index), variant, cfg.base_seed + trial_index, opts);
}

// --- experiments ------------------------------------------------------------

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

const SummaryRow* SummaryTable::find(const std::string& label) const {
  for (const auto& r : rows) {
    if (r.policy == label) return &r;
  }
  return nullptr;
}

namespace {

struct Job {
  std::size_t variant;
  std::size_t trial;
};

struct JobResult {
  RegretTrace trace;
  std::string error;
};

struct ExperimentPlan {
  std::vector<PolicyVariant> variants;
  std::vector<std::shared_ptr<const EnvironmentSpec>> envs;  // per trial
  std::vector<Job> jobs;
  TrialOptions opts;
};

void run_job(const ExperimentPlan& plan, const ExperimentConfig& cfg, const Job& job, JobResult& out) {
  try {
    out.trace = run_trial(plan.envs[job.trial], plan.variants[job.variant], cfg.base_seed + job.trial, plan.opts);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
}

void run_jobs_serial(const ExperimentPlan& plan, const ExperimentConfig& cfg, std::vector<JobResult>& results) {
  for (std::size_t j = 0; j < plan.jobs.size(); ++j) run_job(plan, cfg, plan.jobs[j], results[j]);
}

void run_jobs_parallel(const ExperimentPlan& plan, const ExperimentConfig& cfg, std::vector<JobResult>& results) {
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  const auto n = static_cast<long>(plan.jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long j = 0; j < n; ++j) {
    run_job(plan, cfg, plan.jobs[static_cast<std::size_t>(j)], results[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

SummaryTable run_experiment(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  ExperimentPlan plan;
  for (const auto& spec : cfg.policies) {
    for (auto& v : expand_grid(spec)) plan.variants.push_back(std::move(v));
  }

  const bool shared_env = cfg.env.kind == EnvKind::kDataset ||
                          (cfg.env.kind == EnvKind::kSynthetic && !cfg.env.resample);
  plan.envs.resize(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    plan.envs[t] = (shared_env && t > 0) ? plan.envs[0] : build_environment(cfg, t);
  }
  for (std::size_t v = 0; v < plan.variants.size(); ++v) {
    for (std::size_t t = 0; t < cfg.trials; ++t) plan.jobs.push_back({v, t});
  }
  plan.opts.horizon = cfg.horizon;
  plan.opts.audits = cfg.audits;
  plan.opts.failure_prob = cfg.failure_prob;
  plan.opts.keep_rounds = !cfg.output_dir.empty();

  std::vector<JobResult> results(plan.jobs.size());
  if (exec == Execution::kParallel) {
    run_jobs_parallel(plan, cfg, results);
  } else {
    run_jobs_serial(plan, cfg, results);
  }

  SummaryTable table;
  for (std::size_t v = 0; v < plan.variants.size(); ++v) {
    SummaryRow row;
    row.policy = plan.variants[v].label;
    row.name = plan.variants[v].name;
    row.params = plan.variants[v].params();
    row.trials = cfg.trials;
    std::vector<double> finals, last, elapsed, selections;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      JobResult& r = results[v * cfg.trials + t];
      if (!r.error.empty()) {
        row.failed = true;
        if (row.error.empty()) row.error = "trial " + std::to_string(t) + ": " + r.error;
        continue;
      }
      finals.push_back(r.trace.final_regret);
      last.push_back(r.trace.last_window_regret);
      elapsed.push_back(r.trace.elapsed_s);
      selections.push_back(static_cast<double>(r.trace.selection_count));
      row.audit.merge(r.trace.audit);
      row.traces.push_back(std::move(r.trace));
    }
    if (!row.failed) {
      std::tie(row.mean_final_regret, row.std_final_regret) = mean_std(finals);
      row.mean_last1k_regret = mean_std(last).first;
      row.mean_elapsed_s = mean_std(elapsed).first;
      row.selection_count = mean_std(selections).first;
    }
    table.audit.merge(row.audit);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::map<std::string, const SummaryRow*> pick_winners(const SummaryTable& table, const ExperimentConfig& cfg) {
  std::map<std::string, PolicyVariant> by_label;
  for (const auto& spec : cfg.policies) {
    for (auto& v : expand_grid(spec)) by_label.emplace(v.label, std::move(v));
  }
  std::map<std::string, const SummaryRow*> winners;
  for (const auto& row : table.rows) {
    if (row.failed) continue;
    auto [it, inserted] = winners.try_emplace(row.name, &row);
    if (inserted) continue;
    const SummaryRow* cur = it->second;
    const bool better =
        row.mean_final_regret < cur->mean_final_regret ||
        (row.mean_final_regret == cur->mean_final_regret &&
         grid_key(by_label.at(row.policy).config) < grid_key(by_label.at(cur->policy).config));
    if (better) it->second = &row;
  }
  return winners;
}

GridResult grid_search(const ExperimentConfig& cfg, Execution exec) {
  GridResult out;
  out.table = run_experiment(cfg, exec);
  out.winners = pick_winners(out.table, cfg);
  return out;
}

// --- hard family ------------------------------------------------------------

double zero_information_fraction(std::size_t n_arms, std::size_t horizon) {
  if (n_arms < 2 || horizon < 1) throw Error(ErrorCode::kInvalidArgument, "need >= 2 arms and horizon >= 1");
  std::vector<std::size_t> order(n_arms);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> position(n_arms);

  double total = 0.0;
  double cases = 0.0;
  const bool all_orders = n_arms <= 7;
  do {
    for (std::size_t t = 0; t < n_arms; ++t) position[order[t]] = t;
    // Parameters with support {i, j} (i != j, both orders) and {i}.
    for (std::size_t i = 0; i < n_arms; ++i) {
      for (std::size_t j = 0; j < n_arms; ++j) {
        const std::size_t first = i == j ? position[i] : std::min(position[i], position[j]);
        total += static_cast<double>(std::min(horizon, first));
        cases += 1.0;
      }
    }
  } while (all_orders && std::next_permutation(order.begin(), order.end()));
  return total / cases / static_cast<double>(horizon);
}

std::vector<PolicySpec> default_hard_policies(double delta, int d) {
  auto single = [](std::string name, PolicyKind kind) {
    PolicySpec p;
    p.name = std::move(name);
    p.kind = kind;
    return p;
  };
  std::vector<PolicySpec> out;
  out.push_back(single("oful", PolicyKind::kOful));
  PolicySpec ds = single("ds_oful", PolicyKind::kDsOful);
  ds.gamma = {delta / std::sqrt(static_cast<double>(d))};
  out.push_back(ds);
  out.push_back(single("suplinucb", PolicyKind::kSupLinUcb));
  PolicySpec lsw = single("lsw", PolicyKind::kLsw);
  lsw.eps_lsw = {3.0 * delta * std::sqrt(8.0 * std::log(32.0) / (d - 1))};
  out.push_back(lsw);
  out.push_back(single("mab_ucb", PolicyKind::kMabUcb));
  return out;
}

HardResult run_hard_experiment(const HardConfig& cfg, Execution exec) {
  if (cfg.draws < 1 || cfg.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "draws and horizon must be >= 1");
  const HardInstanceFamily fam = gen_hard_instance(cfg.d, cfg.arms, cfg.delta, cfg.seed);
  const std::vector<PolicySpec> specs = cfg.policies.empty() ? default_hard_policies(cfg.delta, cfg.d) : cfg.policies;

  std::vector<PolicyVariant> variants;
  for (const auto& s : specs) {
    auto v = expand_grid(s);
    variants.push_back(v.front());
  }

  Rng rng = make_stream(cfg.seed, 30);
  std::uniform_int_distribution<std::size_t> pick(0, fam.params.size() - 1);
  std::vector<std::shared_ptr<const EnvironmentSpec>> envs(cfg.draws);
  for (auto& e : envs) e = std::make_shared<const EnvironmentSpec>(fam.instance(pick(rng)));

  TrialOptions opts;
  opts.horizon = cfg.horizon;
  opts.keep_rounds = true;

  const std::size_t jobs = variants.size() * cfg.draws;
  std::vector<double> regret(jobs, 0.0), zero_frac(jobs, 0.0);
  std::vector<std::string> errors(jobs);
  auto work = [&](std::size_t j) {
    const std::size_t v = j / cfg.draws;
    const std::size_t draw = j % cfg.draws;
    try {
      const RegretTrace tr = run_trial(envs[draw], variants[v], cfg.seed + draw, opts);
      regret[j] = tr.final_regret;
      std::size_t zeros = 0;
      for (const auto& r : tr.rounds) {
        if (envs[draw]->expected_reward[r.arm] == 0.0) ++zeros;
      }
      zero_frac[j] = static_cast<double>(zeros) / static_cast<double>(cfg.horizon);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  };
  if (exec == Execution::kParallel) {
    const auto n = static_cast<long>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < n; ++j) work(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < jobs; ++j) work(j);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::kInvalidArgument, "hard experiment trial failed: " + e);
  }

  HardResult out;
  out.epsilon = fam.epsilon;
  out.zeta = fam.zeta;
  out.zero_information_fraction = zero_information_fraction(fam.n_arms(), cfg.horizon);
  out.lower_threshold = 0.5 * cfg.delta * static_cast<double>(cfg.horizon) * out.zero_information_fraction;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    HardResult::Row row;
    row.policy = variants[v].label;
    row.regrets.assign(regret.begin() + static_cast<long>(v * cfg.draws),
                       regret.begin() + static_cast<long>((v + 1) * cfg.draws));
    row.mean_regret = mean_std(row.regrets).first;
    std::vector<double> zf(zero_frac.begin() + static_cast<long>(v * cfg.draws),
                           zero_frac.begin() + static_cast<long>((v + 1) * cfg.draws));
    row.mean_zero_reward_fraction = mean_std(zf).first;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace bandit
