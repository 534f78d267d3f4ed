#pragma once

#include <string>
#include <vector>

#include "bandit/harness.hpp"

namespace bandit {

inline constexpr const char* kTraceHeader = "round,arm,reward,inst_regret,cum_regret,bonus,selected,level";
inline constexpr const char* kSummaryHeader =
    "policy,params,mean_final_regret,std_final_regret,mean_last1k_regret,mean_elapsed_s,selection_count";

/// Shortest-exact form with 17 significant digits.
std::string format_double(double v);

/// `trace_<policy>_<seed>.csv` with characters outside [A-Za-z0-9._=-] replaced by '_'.
std::string trace_filename(const std::string& policy, std::uint64_t seed);

void write_trace_csv(const RegretTrace& trace, const std::string& path);
void write_summary_csv(const SummaryTable& table, const std::string& path);

/// Writes summary.csv and one trace file per trial that kept its rounds into
/// `dir` (created if missing). Returns the trace paths in row/seed order.
std::vector<std::string> export_csv(const SummaryTable& table, const std::string& dir);

std::vector<RoundRecord> read_trace_csv(const std::string& path);

struct SummaryCsvRow {
  std::string policy;
  std::string params;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_last1k_regret = 0.0;
  double mean_elapsed_s = 0.0;
  double selection_count = 0.0;
};

std::vector<SummaryCsvRow> read_summary_csv(const std::string& path);

}  // namespace bandit
