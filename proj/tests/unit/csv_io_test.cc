#include "bandit/csv_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace bandit {
namespace {

using testing::code_of;

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

ExperimentConfig csv_config(const std::string& out) {
  ExperimentConfig cfg;
  cfg.env.d = 4;
  cfg.env.n = 12;
  cfg.env.seed = 2;
  cfg.horizon = 500;
  cfg.trials = 4;
  cfg.audits = AuditFlags::none();
  cfg.output_dir = out;
  PolicySpec p;
  p.name = "ds";
  p.kind = PolicyKind::kDsOful;
  p.gamma = {0.1};
  p.beta = {1, 3};
  cfg.policies = {p};
  return cfg;
}

TEST(CsvTest, FormatsSeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(CsvTest, TraceFileNames) {
  EXPECT_EQ(trace_filename("ds_0.05_beta=3", 7), "trace_ds_0.05_beta=3_7.csv");
  EXPECT_EQ(trace_filename("a/b c", 0), "trace_a_b_c_0.csv");
}

TEST(CsvTest, EmptyTableWritesHeaderOnly) {
  testing::TempDir dir("csv");
  const auto paths = export_csv(SummaryTable{}, dir.path().string());
  EXPECT_TRUE(paths.empty());
  std::ifstream in(dir.file("summary.csv"));
  std::string header, extra;
  std::getline(in, header);
  EXPECT_EQ(header, kSummaryHeader);
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(CsvTest, RoundTripResumsExactly) {
  testing::TempDir dir("csv");
  const ExperimentConfig cfg = csv_config(dir.path().string());
  const SummaryTable table = run_experiment(cfg);
  const auto paths = export_csv(table, cfg.output_dir);
  ASSERT_EQ(paths.size(), 8u);
  EXPECT_EQ(std::filesystem::path(paths[0]).filename(), "trace_ds_beta=1_0.csv");
  for (const auto& p : paths) {
    EXPECT_EQ(line_count(p), cfg.horizon + 1);
    const auto rows = read_trace_csv(p);
    double cum = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      EXPECT_EQ(rows[k].round, k + 1);
      cum += rows[k].inst_regret;
      ASSERT_EQ(cum, rows[k].cum_regret) << p << " round " << k + 1;
    }
  }
  // Persisted traces reproduce the summary statistics.
  const auto summary = read_summary_csv(dir.file("summary.csv"));
  ASSERT_EQ(summary.size(), table.rows.size());
  for (std::size_t i = 0; i < summary.size(); ++i) {
    EXPECT_EQ(summary[i].policy, table.rows[i].policy);
    std::vector<double> finals;
    for (std::uint64_t s = 0; s < cfg.trials; ++s) {
      finals.push_back(read_trace_csv(dir.file(trace_filename(summary[i].policy, s))).back().cum_regret);
    }
    double mean = 0.0;
    for (double f : finals) mean += f;
    mean /= finals.size();
    double ss = 0.0;
    for (double f : finals) ss += (f - mean) * (f - mean);
    EXPECT_NEAR(summary[i].mean_final_regret, mean, 1e-12 * std::max(1.0, mean));
    EXPECT_NEAR(summary[i].std_final_regret, std::sqrt(ss / (finals.size() - 1)), 1e-9);
  }
}

TEST(CsvTest, TenThousandRoundsGiveTenThousandAndOneLines) {
  testing::TempDir dir("csv");
  ExperimentConfig cfg = csv_config(dir.path().string());
  cfg.horizon = 10000;
  cfg.trials = 1;
  cfg.policies[0].beta = {1};
  const auto paths = export_csv(run_experiment(cfg), cfg.output_dir);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(line_count(paths[0]), 10001u);
}

TEST(CsvTest, ErrorsCarryPath) {
  testing::TempDir dir("csv");
  const std::string bad = dir.file("bad.csv");
  {
    std::ofstream out(bad);
    out << kTraceHeader << "\n1,0,0.5,0,0,1,1\n";
  }
  try {
    read_trace_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
    EXPECT_NE(std::string(e.what()).find(bad + ":2"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { read_trace_csv(dir.file("missing.csv")); }), ErrorCode::kIoError);
  EXPECT_EQ(code_of([&] { write_summary_csv(SummaryTable{}, dir.file("no/such/dir/summary.csv")); }),
            ErrorCode::kIoError);
}

}  // namespace
}  // namespace bandit
