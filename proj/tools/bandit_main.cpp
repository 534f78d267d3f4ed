#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "bandit/config.hpp"
#include "bandit/csv_io.hpp"
#include "bandit/error.hpp"
#include "bandit/harness.hpp"
#include "bandit/theory.hpp"

using namespace bandit;

namespace {

enum Exit { kOk = 0, kBadConfig = 1, kRuntime = 2, kAudit = 3 };

void apply_thread_env(ExperimentConfig& cfg) {
  if (const char* env = std::getenv("BANDIT_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, std::string("BANDIT_THREADS is not an integer: ") + env);
    }
  }
}

void print_table(const SummaryTable& table) {
  std::printf("%-36s %12s %10s %10s %10s %10s\n", "policy", "regret", "std", "last1k", "elapsed_s", "|C_K|");
  for (const auto& r : table.rows) {
    if (r.failed) {
      std::printf("%-36s FAILED: %s\n", r.policy.c_str(), r.error.c_str());
      continue;
    }
    std::printf("%-36s %12.2f %10.2f %10.2f %10.3f %10.1f\n", r.policy.c_str(), r.mean_final_regret,
                r.std_final_regret, r.mean_last1k_regret, r.mean_elapsed_s, r.selection_count);
  }
}

int report_audit(const AuditReport& a) {
  std::printf("audit: %zu cap checks (%zu violations), %zu skipped rounds (%zu violations), "
              "%zu survival checks (%zu violations)",
              a.cap_checks, a.cap_violations, a.skipped_rounds_checked, a.skipped_round_violations,
              a.survival_checks, a.survival_violations);
  if (a.coverage_checks > 0) std::printf(", coverage %zu/%zu outside", a.coverage_violations, a.coverage_checks);
  std::printf("\n");
  for (const auto& m : a.messages) std::printf("  %s\n", m.c_str());
  return a.violations() > 0 ? kAudit : kOk;
}

int finish(const SummaryTable& table, const ExperimentConfig& cfg) {
  if (!cfg.output_dir.empty()) {
    const auto paths = export_csv(table, cfg.output_dir);
    std::printf("wrote summary.csv and %zu trace files to %s\n", paths.size(), cfg.output_dir.c_str());
  }
  int code = report_audit(table.audit);
  for (const auto& r : table.rows) {
    if (r.failed && code == kOk) code = kRuntime;
  }
  return code;
}

void print_theory(const theory::Params& p) {
  const auto& in = p.inputs;
  std::printf("inputs: d=%d gap=%.6g zeta=%.6g L=%.6g B=%.6g R=%.6g delta=%.6g\n", in.d, in.gap, in.zeta, in.L,
              in.B, in.R, in.failure_prob);
  const auto& s = p.single;
  std::printf("single level: lambda=%.6g iota1=%.6g gamma=%.6g iota2=%.6g iota3=%.6g beta=%.6g cap=%.6g\n",
              s.lambda, s.iota1, s.gamma, s.iota2, s.iota3, s.beta, s.selection_cap);
  std::printf("multi level: l_delta=%d\n", p.l_delta);
  for (int l = 1; l <= p.l_delta; ++l) {
    std::printf("  l=%d beta=%.6g iota1=%.6g cap=%.6g\n", l, p.multi.beta_at(l), p.multi.iota1_at(l),
                p.multi.cap_at(l));
  }
  std::printf("regret bounds: ds_oful=%.6g suplinucb=%.6g\n", p.regret_bound_ds, p.regret_bound_sup);
  std::printf("admissible: ds_oful=%s (zeta <= %.6g) suplinucb=%s (zeta < %.6g)\n", p.admissible_ds ? "yes" : "no",
              theory::max_admissible_zeta_ds(in), p.admissible_sup ? "yes" : "no",
              theory::max_admissible_zeta_sup(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misspecified linear contextual bandit experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, audits;
  int threads = -1;
  bool serial = false;
  auto* run = app.add_subcommand("run", "Run every policy of a config for all trials");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Directory for summary.csv and trace CSVs");
  run->add_option("--threads", threads, "OpenMP threads (BANDIT_THREADS overrides)");
  run->add_option("--audits", audits, "Invariant audits")->check(CLI::IsMember({"on", "off"}));
  run->add_flag("--serial", serial, "Use the serial reference path");

  auto* grid = app.add_subcommand("grid", "Grid search; prints the winner per policy");
  grid->add_option("--config", config_path, "Config file")->required();
  grid->add_option("--out", out_dir, "Directory for summary.csv and trace CSVs");

  HardConfig hard_cfg;
  auto* hard = app.add_subcommand("hard", "Hard-instance family experiment");
  hard->add_option("--d", hard_cfg.d, "Dimension")->capture_default_str();
  hard->add_option("--arms", hard_cfg.arms, "Number of arms")->capture_default_str();
  hard->add_option("--delta", hard_cfg.delta, "Gap")->capture_default_str();
  hard->add_option("--k", hard_cfg.horizon, "Horizon")->capture_default_str();
  hard->add_option("--draws", hard_cfg.draws, "Parameter draws")->capture_default_str();
  hard->add_option("--seed", hard_cfg.seed, "Seed")->capture_default_str();

  auto* check = app.add_subcommand("check-theory", "Print theory constants and admissibility for a config");
  check->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }

  try {
    if (*hard) {
      const HardResult r = run_hard_experiment(hard_cfg);
      std::printf("epsilon=%.6g zeta=%.6g zero-information fraction=%.6g threshold=%.6g\n", r.epsilon, r.zeta,
                  r.zero_information_fraction, r.lower_threshold);
      for (const auto& row : r.rows) {
        const bool ok = row.mean_regret >= r.lower_threshold;
        std::printf("%-12s mean regret %.4f zero-reward fraction %.4f %s\n", row.policy.c_str(), row.mean_regret,
                    row.mean_zero_reward_fraction, ok ? "" : "(below threshold)");
      }
      return kOk;
    }

    ExperimentConfig cfg;
    try {
      cfg = load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (threads >= 0) cfg.threads = threads;
      if (audits == "on") cfg.audits = AuditFlags{};
      if (audits == "off") cfg.audits = AuditFlags::none();
      apply_thread_env(cfg);
      cfg.validate();
    } catch (const Error& e) {
      std::cerr << e.what() << '\n';
      return kBadConfig;
    }

    if (*check) {
      const auto env = build_environment(cfg, 0);
      theory::Inputs in{env->dim, env->gap, env->zeta, env->L, env->B,
                        env->noise_scale > 0.0 ? env->noise_scale : 1.0, cfg.failure_prob};
      print_theory(theory::compute_all(in));
      return kOk;
    }
    if (*run) {
      const SummaryTable table = run_experiment(cfg, serial ? Execution::kSerial : Execution::kParallel);
      print_table(table);
      return finish(table, cfg);
    }
    if (*grid) {
      const GridResult g = grid_search(cfg);
      print_table(g.table);
      for (const auto& [name, row] : g.winners) {
        std::printf("winner %-12s %s mean %.2f std %.2f last1k %.2f\n", name.c_str(), row->params.c_str(),
                    row->mean_final_regret, row->std_final_regret, row->mean_last1k_regret);
      }
      return finish(g.table, cfg);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kBadConfig : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
