#include "bandit/theory.hpp"

#include <algorithm>
#include <cmath>

#include "bandit/error.hpp"

namespace bandit::theory {
namespace {

constexpr int kMaxLevel = 64;

void check_common(int d, double L, double B, double R, double failure_prob) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  if (!(L >= 1.0) || !(B >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "L and B must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorCode::kInvalidArgument, "R must be > 0");
  if (!(failure_prob > 0.0 && failure_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "failure probability must be in (0, 1)");
  }
}

void check_gap(double gap) {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw Error(ErrorCode::kInvalidArgument, "gap must be > 0");
}

}  // namespace

double iota1(int d, double gap, double L, double B, double R, double failure_prob) {
  check_common(d, L, B, R, failure_prob);
  check_gap(gap);
  return (24.0 + 18.0 * R) * std::log((72.0 + 54.0 * R) * L * B * std::sqrt(static_cast<double>(d)) / gap) +
         std::sqrt(8.0 * R * R * std::log(1.0 / failure_prob));
}

SingleLevel compute_single_level_params(int d, double gap, double L, double B, double R, double failure_prob) {
  SingleLevel p;
  p.lambda = 1.0 / (B * B);
  p.iota1 = iota1(d, gap, L, B, R, failure_prob);
  p.gamma = gap / (2.0 * std::sqrt(static_cast<double>(d)) * p.iota1);
  p.iota2 = std::log(3.0 * L * B / p.gamma);
  p.iota3 = std::log((1.0 + 16.0 * L * L * B * B * p.iota2 / (p.gamma * p.gamma)) / failure_prob);
  p.beta = 1.0 + 4.0 * std::sqrt(d * p.iota2) + R * std::sqrt(2.0 * d * p.iota3);
  p.selection_cap = 16.0 * d * p.iota2 / (p.gamma * p.gamma);
  return p;
}

double heuristic_gamma(int d, double gap) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  check_gap(gap);
  return gap / std::sqrt(static_cast<double>(d));
}

double beta_level(int level, int d, double L, double B, double R, double failure_prob) {
  check_common(d, L, B, R, failure_prob);
  if (level < 1) throw Error(ErrorCode::kInvalidArgument, "level must be >= 1");
  const double two_l = std::ldexp(1.0, level);
  const double i1 = std::log(3.0 * L * B * two_l);
  const double i2 = std::log((d * two_l + 16.0 * L * L * B * B * two_l * two_l * two_l * i1) / (d * failure_prob));
  return 1.0 + R * std::sqrt(2.0 * d * i2);
}

MultiLevel compute_multi_level_params(int d, double L, double B, double R, double failure_prob, int l_max) {
  check_common(d, L, B, R, failure_prob);
  if (l_max < 1) throw Error(ErrorCode::kInvalidArgument, "l_max must be >= 1");
  MultiLevel p;
  p.lambda = 1.0 / (B * B);
  for (int l = 1; l <= l_max; ++l) {
    const double two_l = std::ldexp(1.0, l);
    const double i1 = std::log(3.0 * L * B * two_l);
    const double i2 = std::log((d * two_l + 16.0 * L * L * B * B * two_l * two_l * two_l * i1) / (d * failure_prob));
    p.iota1.push_back(i1);
    p.iota2.push_back(i2);
    p.beta.push_back(1.0 + R * std::sqrt(2.0 * d * i2));
    p.level_caps.push_back(16.0 * d * two_l * two_l * i1);
  }
  return p;
}

int solve_l_delta(double gap, int d, double L, double B, double R, double failure_prob) {
  check_gap(gap);
  for (int l = 1; l <= kMaxLevel; ++l) {
    if (std::ldexp(1.0, l) > 8.0 * beta_level(l, d, L, B, R, failure_prob) / gap) return l;
  }
  throw Error(ErrorCode::kNoSolution, "no level <= 64 satisfies 2^l > 8 beta(l) / gap");
}

bool misspec_admissible(double zeta, double gap, int d, double iota1) {
  return 2.0 * std::sqrt(static_cast<double>(d)) * zeta * iota1 <= gap;
}

bool misspec_admissible_sup(double zeta, double gap, int d, int l_delta, double iota1_at_l_delta) {
  return 4.0 * l_delta * zeta * (1.0 + 4.0 * std::sqrt(d * iota1_at_l_delta)) < gap;
}

double regret_bound_ds(const SingleLevel& p, int d, double gap) {
  check_gap(gap);
  const double dd = static_cast<double>(d);
  return 32.0 * p.beta *
         std::sqrt(2.0 * dd * dd * dd * p.iota2 * std::log(1.0 + 16.0 * dd * p.iota2 / (p.gamma * p.gamma))) *
         p.iota1 / gap;
}

double regret_bound_sup(const MultiLevel& p, int d, double gap, int l_delta) {
  check_gap(gap);
  const double b = p.beta_at(l_delta);
  return 2560.0 * d * b * b * p.iota1_at(l_delta) / gap;
}

Params compute_all(const Inputs& in, int l_max) {
  Params out;
  out.inputs = in;
  out.single = compute_single_level_params(in.d, in.gap, in.L, in.B, in.R, in.failure_prob);
  out.l_delta = solve_l_delta(in.gap, in.d, in.L, in.B, in.R, in.failure_prob);
  out.multi = compute_multi_level_params(in.d, in.L, in.B, in.R, in.failure_prob, std::max(l_max, out.l_delta));
  out.regret_bound_ds = regret_bound_ds(out.single, in.d, in.gap);
  out.regret_bound_sup = regret_bound_sup(out.multi, in.d, in.gap, out.l_delta);
  out.admissible_ds = misspec_admissible(in.zeta, in.gap, in.d, out.single.iota1);
  out.admissible_sup = misspec_admissible_sup(in.zeta, in.gap, in.d, out.l_delta, out.multi.iota1_at(out.l_delta));
  return out;
}

double max_admissible_zeta_ds(const Inputs& in) {
  const double i1 = iota1(in.d, in.gap, in.L, in.B, in.R, in.failure_prob);
  return in.gap / (2.0 * std::sqrt(static_cast<double>(in.d)) * i1);
}

double max_admissible_zeta_sup(const Inputs& in) {
  const int l = solve_l_delta(in.gap, in.d, in.L, in.B, in.R, in.failure_prob);
  const double i1 = std::log(3.0 * in.L * in.B * std::ldexp(1.0, l));
  return in.gap / (4.0 * l * (1.0 + 4.0 * std::sqrt(in.d * i1)));
}

}  // namespace bandit::theory
