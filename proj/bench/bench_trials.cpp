// Serial reference vs OpenMP trial fan-out on a reduced synthetic experiment.

#include <benchmark/benchmark.h>

#include "bandit/config.hpp"
#include "bandit/harness.hpp"

namespace {

bandit::ExperimentConfig bench_config(std::size_t horizon) {
  bandit::ExperimentConfig cfg = bandit::parse_config(
      "horizon = 2000\ntrials = 8\n"
      "policy.oful.kind = oful\n"
      "policy.ds.kind = ds_oful\npolicy.ds.gamma = 0.05\n"
      "policy.sup.kind = suplinucb\npolicy.sup.level_beta = constant\n");
  cfg.horizon = horizon;
  cfg.audits = bandit::AuditFlags::none();
  return cfg;
}

void BM_Experiment(benchmark::State& state, bandit::Execution exec) {
  bandit::ExperimentConfig cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  if (exec == bandit::Execution::kParallel) cfg.threads = static_cast<int>(state.range(1));
  double regret = 0.0;
  for (auto _ : state) {
    const bandit::SummaryTable t = bandit::run_experiment(cfg, exec);
    regret = t.rows.front().mean_final_regret;
    benchmark::DoNotOptimize(regret);
  }
  state.counters["trials"] = static_cast<double>(cfg.trials * cfg.policies.size());
  state.counters["rounds/s"] = benchmark::Counter(
      static_cast<double>(cfg.trials * cfg.policies.size() * cfg.horizon), benchmark::Counter::kIsIterationInvariantRate);
}

BENCHMARK_CAPTURE(BM_Experiment, serial, bandit::Execution::kSerial)
    ->Args({2000, 1})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(BM_Experiment, parallel, bandit::Execution::kParallel)
    ->Args({2000, 1})
    ->Args({2000, 2})
    ->Args({2000, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
