#include "bandit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "bandit/error.hpp"

namespace bandit {
namespace {

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, std::size_t line) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(line, "expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& v, std::size_t line) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(line, "expected an integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& v, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(trim(item), line));
  if (out.empty()) bad(line, "empty list");
  return out;
}

bool to_bool(const std::string& v, std::size_t line) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  bad(line, "expected on/off, got '" + v + "'");
}

PolicySpec make_spec(std::string name, PolicyKind kind, std::vector<double> gamma) {
  PolicySpec p;
  p.name = std::move(name);
  p.kind = kind;
  p.gamma = std::move(gamma);
  p.beta = {1.0, 3.0, 10.0};
  p.lambda = {1.0, 3.0, 10.0};
  return p;
}

}  // namespace

const char* to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::kFixed: return "fixed";
    case ParamMode::kTheory: return "theory";
    case ParamMode::kHeuristic: return "heuristic";
  }
  return "unknown";
}

std::vector<PolicySpec> default_policies() {
  std::vector<PolicySpec> out;
  out.push_back(make_spec("oful", PolicyKind::kOful, {0.0}));
  out.push_back(make_spec("ds_0.02", PolicyKind::kDsOful, {0.02}));
  out.push_back(make_spec("ds_0.05", PolicyKind::kDsOful, {0.05}));
  out.push_back(make_spec("ds_0.08", PolicyKind::kDsOful, {0.08}));
  out.push_back(make_spec("ds_0.18", PolicyKind::kDsOful, {0.18}));
  PolicySpec sup = make_spec("suplinucb", PolicyKind::kSupLinUcb, {0.0});
  sup.level_beta = LevelBeta::kConstant;
  out.push_back(sup);
  return out;
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  if (trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  if (policies.empty()) throw Error(ErrorCode::kInvalidConfig, "at least one policy is required");
  if (!(failure_prob > 0.0 && failure_prob < 1.0)) throw Error(ErrorCode::kInvalidConfig, "theory.delta must be in (0,1)");
  if (env.kind == EnvKind::kDataset && env.path.empty()) throw Error(ErrorCode::kInvalidConfig, "env.path is required for dataset");
  std::map<std::string, int> seen;
  for (const auto& p : policies) {
    if (p.name.empty()) throw Error(ErrorCode::kInvalidConfig, "policy without a name");
    if (++seen[p.name] > 1) throw Error(ErrorCode::kInvalidConfig, "duplicate policy " + p.name);
    if (p.gamma.empty() || p.beta.empty() || p.lambda.empty() || p.eps_lsw.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "policy " + p.name + " has an empty grid");
    }
    for (double l : p.lambda) {
      if (!(l > 0.0)) throw Error(ErrorCode::kInvalidConfig, "policy " + p.name + ": lambda must be > 0");
    }
    for (double g : p.gamma) {
      if (!(g >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "policy " + p.name + ": gamma must be >= 0");
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, PolicySpec> named;
  std::vector<std::string> order;

  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) bad(line_no, "empty value for " + key);

    if (key == "env.kind") {
      if (value == "synthetic") cfg.env.kind = EnvKind::kSynthetic;
      else if (value == "dataset") cfg.env.kind = EnvKind::kDataset;
      else if (value == "hard") cfg.env.kind = EnvKind::kHard;
      else bad(line_no, "unknown env.kind '" + value + "'");
    } else if (key == "env.d") {
      cfg.env.d = static_cast<int>(to_int(value, line_no));
    } else if (key == "env.n") {
      cfg.env.n = static_cast<int>(to_int(value, line_no));
    } else if (key == "env.zeta") {
      cfg.env.zeta = to_double(value, line_no);
    } else if (key == "env.seed") {
      cfg.env.seed = static_cast<std::uint64_t>(to_int(value, line_no));
    } else if (key == "env.noise") {
      cfg.env.noise = to_double(value, line_no);
    } else if (key == "env.resample") {
      cfg.env.resample = to_bool(value, line_no);
    } else if (key == "env.path") {
      cfg.env.path = value;
    } else if (key == "env.arms") {
      cfg.env.arms = static_cast<int>(to_int(value, line_no));
    } else if (key == "env.delta") {
      cfg.env.delta = to_double(value, line_no);
    } else if (key == "env.draws") {
      cfg.env.draws = static_cast<std::size_t>(to_int(value, line_no));
    } else if (key == "horizon") {
      const auto v = to_int(value, line_no);
      if (v < 1) bad(line_no, "horizon must be >= 1");
      cfg.horizon = static_cast<std::size_t>(v);
    } else if (key == "trials") {
      const auto v = to_int(value, line_no);
      if (v < 1) bad(line_no, "trials must be >= 1");
      cfg.trials = static_cast<std::size_t>(v);
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(to_int(value, line_no));
    } else if (key == "audits") {
      cfg.audits = to_bool(value, line_no) ? AuditFlags{} : AuditFlags::none();
    } else if (key == "audits.coverage") {
      cfg.audits.coverage = to_bool(value, line_no);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(to_int(value, line_no));
    } else if (key == "theory.delta") {
      cfg.failure_prob = to_double(value, line_no);
    } else if (key.rfind("policy.", 0) == 0) {
      const auto dot = key.rfind('.');
      if (dot <= 7) bad(line_no, "expected policy.<name>.<field>");
      const std::string name = key.substr(7, dot - 7);
      const std::string field = key.substr(dot + 1);
      auto [it, inserted] = named.try_emplace(name);
      if (inserted) {
        it->second.name = name;
        order.push_back(name);
      }
      PolicySpec& p = it->second;
      if (field == "kind") {
        const auto kind = parse_policy_kind(value);
        if (!kind) bad(line_no, "unknown policy kind '" + value + "'");
        p.kind = *kind;
      } else if (field == "gamma") {
        p.gamma = to_list(value, line_no);
      } else if (field == "beta") {
        p.beta = to_list(value, line_no);
      } else if (field == "lambda") {
        p.lambda = to_list(value, line_no);
      } else if (field == "eps_lsw") {
        p.eps_lsw = to_list(value, line_no);
      } else if (field == "mode") {
        if (value == "fixed") p.mode = ParamMode::kFixed;
        else if (value == "theory") p.mode = ParamMode::kTheory;
        else if (value == "heuristic") p.mode = ParamMode::kHeuristic;
        else bad(line_no, "unknown mode '" + value + "'");
      } else if (field == "level_beta") {
        if (value == "theory") p.level_beta = LevelBeta::kTheory;
        else if (value == "constant") p.level_beta = LevelBeta::kConstant;
        else bad(line_no, "unknown level_beta '" + value + "'");
      } else if (field == "delta") {
        p.failure_prob = to_double(value, line_no);
      } else {
        bad(line_no, "unknown policy field '" + field + "'");
      }
    } else {
      bad(line_no, "unknown key '" + key + "'");
    }
  }

  if (order.empty()) {
    cfg.policies = default_policies();
  } else {
    for (const auto& n : order) cfg.policies.push_back(named.at(n));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace bandit
