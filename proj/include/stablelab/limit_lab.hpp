#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stablelab/process.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

/// {0.1, 0.2, ..., 2.0}.
std::vector<double> default_lambda_grid();

struct ExperimentConfig {
  MAProcessSpec spec;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 100000;
  double a = 0.0;  // split-check truncation; 0 picks a with a^-alpha = 0.01
  std::vector<double> lambda_grid = default_lambda_grid();
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Throws ContractError unless n_grid is strictly increasing and nonempty,
/// reps >= 1000 and a >= 0.
void validate(const ExperimentConfig& config);

/// config.a, or 100^{1/alpha} when it is 0.
double split_truncation(const ExperimentConfig& config);

/// Stream tag used for the replicate paths of length n; shared by every
/// check that looks at S_n so their samples coincide.
std::string path_tag(std::size_t n);

/// reps copies of S_n / b_n, replicate i drawn from derive(seed, path_tag(n), i).
std::vector<double> normalized_sums(const MAProcessSpec& spec, std::size_t n, double b_n, std::size_t reps,
                                    std::uint64_t seed, unsigned workers);

/// B_n of the exact marginal.
double normalizing_constant(const MAProcessSpec& spec, std::size_t n);

/// One-sample KS of `samples` against the stable law, cdf evaluated in parallel.
KsResult ks_against(std::vector<double> samples, const StableParams& law, unsigned workers);

struct ConvergenceRow {
  std::size_t n = 0;
  double b_n = 0.0;
  double ks = 0.0;
  double ks_p = 0.0;
  double ecf_gap = 0.0;  // sup over the lambda grid of |ecf - cf of the limit|
  StableParams fitted;
};

struct ConvergenceReport {
  StableParams limit;
  std::vector<ConvergenceRow> rows;
};

/// S_n / B_n against the closed-form limit law. The caller is expected to
/// have checked condition_part_report for the process.
ConvergenceReport verify_main(const ExperimentConfig& config);

struct Alpha1Row {
  std::size_t n = 0;
  double ks = 0.0;  // two-sample, S_n / n against X_1
  double ks_p = 0.0;
  double ecf_gap = 0.0;  // sup over the lambda grid of |ecf(S_n / n) - ecf(X_1)|
};

/// S_n / n has the law of X_1 for every n when alpha = 1 and the innovation
/// is symmetric. ContractError for any other alpha.
std::vector<Alpha1Row> verify_alpha1_identity(const ExperimentConfig& config);

struct TangentRow {
  std::size_t block = 0;
  double gap = 0.0;  // sup_lambda |cf of mu_N^{*1/N} - cf of mu_inf| in B_n units
};

struct TangentReport {
  StableParams limit;
  std::vector<TangentRow> rows;
  bool monotone = true;  // nonincreasing in N up to 8 ulp of rounding
};

/// Deterministic: convolution root of the exact law of S_N against the limit.
TangentReport verify_tangent_convergence(const MAProcessSpec& spec, const std::vector<std::size_t>& block_grid,
                                         const std::vector<double>& lambda_grid = default_lambda_grid());

struct SplitRow {
  std::size_t n = 0;
  double b_n = 0.0;
  double p_nonzero_v = 0.0;  // empirical P(V != 0)
  double se = 0.0;
  double union_bound = 0.0;        // n P(|X_1| > a B_n)
  double independent_exact = 0.0;  // 1 - (1 - P(|X_1| > a B_n))^n
  double max_identity_error = 0.0;  // max |T + V - S_n / B_n| over replicates
  bool within_bound = false;        // empirical <= bound + 3 SE
};

/// T = sum f_a(X_j / B_n), V = S_n / B_n - T.
std::vector<SplitRow> truncation_split_check(const ExperimentConfig& config);

struct NewmanConfig {
  MAProcessSpec spec;
  std::size_t m = 50;
  std::size_t block = 20;
  double a = 1.0;
  double lambda = 1.0;
  std::size_t reps = 20000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string label;
};

struct NewmanResult {
  NewmanConfig config;
  Estimate lhs;    // |E e^{i lambda T} - (E e^{i lambda T_N})^m|
  Estimate rhs;    // lambda^2 / 2 (Var T - m Var T_N)
  Estimate slack;  // rhs - lhs
  double majorant = 0.0;  // lambda^2 a^{2-alpha} N^-1 sum_l min(N, l) int f_1 f_1 d nu_{1,1+l}
  bool holds = false;     // lhs <= rhs + 3 SE(slack)
};

NewmanResult newman_gap_check(const NewmanConfig& config);

/// Five associated specs crossed with four (m, N, lambda) settings, a = 1.
std::vector<NewmanConfig> default_newman_battery(std::size_t reps = 20000, std::uint64_t seed = 0,
                                                 unsigned workers = 1);

}  // namespace stablelab
