#pragma once

#include <vector>

namespace bandit::theory {

/// Problem constants the guarantees are stated in terms of.
struct Inputs {
  int d = 1;
  double gap = 0.0;           // minimal sub-optimality gap
  double zeta = 0.0;          // misspecification level
  double L = 1.0;             // context norm bound
  double B = 1.0;             // parameter norm bound
  double R = 1.0;             // sub-Gaussian noise scale
  double failure_prob = 0.1;  // confidence parameter delta
};

/// Constants of the single-level (data-selection) guarantee.
struct SingleLevel {
  double lambda = 0.0;         // B^-2
  double iota1 = 0.0;
  double gamma = 0.0;          // gap / (2 sqrt(d) iota1)
  double iota2 = 0.0;          // log(3 L B / gamma)
  double iota3 = 0.0;
  double beta = 0.0;
  double selection_cap = 0.0;  // 16 d gamma^-2 iota2
};

/// Per-level constants of the multi-level guarantee, index 0 is level 1.
struct MultiLevel {
  double lambda = 0.0;
  std::vector<double> iota1;  // log(3 L B 2^l)
  std::vector<double> iota2;
  std::vector<double> beta;   // 1 + R sqrt(2 d iota2(l))
  std::vector<double> level_caps;  // 16 d 4^l iota1(l)

  double beta_at(int level) const { return beta.at(static_cast<std::size_t>(level - 1)); }
  double iota1_at(int level) const { return iota1.at(static_cast<std::size_t>(level - 1)); }
  double cap_at(int level) const { return level_caps.at(static_cast<std::size_t>(level - 1)); }
};

struct Params {
  Inputs inputs;
  SingleLevel single;
  MultiLevel multi;
  int l_delta = 0;
  double regret_bound_ds = 0.0;
  double regret_bound_sup = 0.0;
  bool admissible_ds = false;
  bool admissible_sup = false;
};

double iota1(int d, double gap, double L, double B, double R, double failure_prob);

SingleLevel compute_single_level_params(int d, double gap, double L, double B, double R, double failure_prob);

/// Experiment heuristic threshold gap / sqrt(d).
double heuristic_gamma(int d, double gap);

double beta_level(int level, int d, double L, double B, double R, double failure_prob);
MultiLevel compute_multi_level_params(int d, double L, double B, double R, double failure_prob, int l_max);

/// Smallest l >= 1 with 2^l > 8 beta(l) / gap. Throws kNoSolution past level 64.
int solve_l_delta(double gap, int d, double L, double B, double R, double failure_prob);

/// 2 sqrt(d) zeta iota1 <= gap.
bool misspec_admissible(double zeta, double gap, int d, double iota1);
/// 4 l_gap zeta (1 + 4 sqrt(d iota1(l_gap))) < gap.
bool misspec_admissible_sup(double zeta, double gap, int d, int l_delta, double iota1_at_l_delta);

/// Closed-form cumulative regret bounds of the two algorithms.
double regret_bound_ds(const SingleLevel& p, int d, double gap);
double regret_bound_sup(const MultiLevel& p, int d, double gap, int l_delta);

/// Everything at once; the multi-level tables extend to max(l_delta, l_max).
Params compute_all(const Inputs& in, int l_max = 16);

/// Upper limits on zeta for each admissibility predicate.
double max_admissible_zeta_ds(const Inputs& in);
double max_admissible_zeta_sup(const Inputs& in);

}  // namespace bandit::theory
