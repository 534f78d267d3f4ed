#include "bandit/csv_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bandit/error.hpp"

namespace bandit {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad(const std::string& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kIoError, path + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse(const std::string& s, const std::string& path, std::size_t line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad(path, line, "bad field '" + s + "'");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string trace_filename(const std::string& policy, std::uint64_t seed) {
  std::string safe = policy;
  for (char& c : safe) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '=' || c == '-';
    if (!ok) c = '_';
  }
  return "trace_" + safe + "_" + std::to_string(seed) + ".csv";
}

void write_trace_csv(const RegretTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rounds) {
    out << r.round << ',' << r.arm << ',' << format_double(r.reward) << ',' << format_double(r.inst_regret) << ','
        << format_double(r.cum_regret) << ',' << format_double(r.bonus) << ',' << (r.selected ? 1 : 0) << ','
        << r.level << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

void write_summary_csv(const SummaryTable& table, const std::string& path) {
  auto out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const auto& row : table.rows) {
    if (row.failed) continue;
    out << row.policy << ',' << row.params << ',' << format_double(row.mean_final_regret) << ','
        << format_double(row.std_final_regret) << ',' << format_double(row.mean_last1k_regret) << ','
        << format_double(row.mean_elapsed_s) << ',' << format_double(row.selection_count) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

std::vector<std::string> export_csv(const SummaryTable& table, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  write_summary_csv(table, (base / "summary.csv").string());
  std::vector<std::string> paths;
  for (const auto& row : table.rows) {
    for (const auto& tr : row.traces) {
      if (tr.rounds.empty()) continue;
      const std::string p = (base / trace_filename(row.policy, tr.seed)).string();
      write_trace_csv(tr, p);
      paths.push_back(p);
    }
  }
  return paths;
}

std::vector<RoundRecord> read_trace_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) bad(path, 1, "unexpected trace header");
  std::vector<RoundRecord> out;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) bad(path, n, "expected 8 fields, got " + std::to_string(f.size()));
    RoundRecord r;
    r.round = parse<std::size_t>(f[0], path, n);
    r.arm = parse<std::size_t>(f[1], path, n);
    r.reward = parse<double>(f[2], path, n);
    r.inst_regret = parse<double>(f[3], path, n);
    r.cum_regret = parse<double>(f[4], path, n);
    r.bonus = parse<double>(f[5], path, n);
    r.selected = parse<int>(f[6], path, n) != 0;
    r.level = parse<int>(f[7], path, n);
    out.push_back(r);
  }
  return out;
}

std::vector<SummaryCsvRow> read_summary_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) bad(path, 1, "unexpected summary header");
  std::vector<SummaryCsvRow> out;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) bad(path, n, "expected 7 fields, got " + std::to_string(f.size()));
    SummaryCsvRow r;
    r.policy = f[0];
    r.params = f[1];
    r.mean_final_regret = parse<double>(f[2], path, n);
    r.std_final_regret = parse<double>(f[3], path, n);
    r.mean_last1k_regret = parse<double>(f[4], path, n);
    r.mean_elapsed_s = parse<double>(f[5], path, n);
    r.selection_count = parse<double>(f[6], path, n);
    out.push_back(r);
  }
  return out;
}

}  // namespace bandit
