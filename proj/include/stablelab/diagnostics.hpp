#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablelab/process.hpp"
#include "stablelab/rng.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

/// f_a(x): x clamped to [-a, a].
double truncate(double x, double a);

enum class Sampling {
  /// Defensive-mixture tilt of the CMS angle of one innovation shared by the
  /// coordinates involved; weights are bounded by 2, estimates unbiased.
  importance,
  plain,
};

struct McOptions {
  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  Sampling sampling = Sampling::importance;
  std::size_t groups = 100;  // jackknife groups
};

/// Draws (X_1, ..., X_{1+span}) of an MA process with a likelihood-ratio
/// weight. The innovations with z-index in [shared_lo, shared_hi] are the
/// candidates for the tilt (z[m] = Z_{m+1-q}); an empty range means plain
/// sampling with weight 1.
class WindowSampler {
 public:
  WindowSampler(const MAProcessSpec& spec, std::size_t span, long long shared_lo, long long shared_hi,
                Sampling sampling);

  /// Fills x with span+1 values and returns the weight.
  double draw(RngStream& stream, std::vector<double>& x);

  std::size_t span() const noexcept { return span_; }

  static constexpr double kMix = 0.5;
  static constexpr double kMinGap = 1e-14;

 private:
  MAProcessSpec spec_;
  StableSampler sampler_;
  std::size_t span_;
  long long lo_;
  long long hi_;
  bool tilt_;
  std::vector<double> z_;
};

/// Cov(f_a(X_1), f_a(X_{1+lag})) with jackknife SE.
Estimate empirical_trunc_cov(const MAProcessSpec& spec, std::size_t lag, double a, const McOptions& options);

/// Cov(f_L(X_1), f_L(X_{1+r})) for every truncation level L and lag r from
/// one set of replicates; also the lag sum per level.
struct TruncCovTable {
  std::vector<double> levels;
  std::vector<std::size_t> lags;
  std::vector<std::vector<Estimate>> cov;  // [level][lag]
  std::vector<Estimate> lag_sum;            // [level]
};

TruncCovTable trunc_cov_table(const MAProcessSpec& spec, const std::vector<std::size_t>& lags,
                              const std::vector<double>& levels, const McOptions& options);

struct SingleLagRow {
  std::size_t n = 0;
  double b_n = 0.0;
  double estimate = 0.0;  // n B_n^-2 Cov(f_{a B_n}(X_1), f_{a B_n}(X_{1+r}))
  double se = 0.0;
  double limit = 0.0;  // int f_a f_a d nu_{1,1+r}
  double relative_gap = 0.0;
};

struct SingleLagTable {
  std::size_t lag = 1;
  double a = 1.0;
  std::vector<SingleLagRow> rows;
};

SingleLagTable single_lag_limit_check(const MAProcessSpec& spec, std::size_t lag, double a,
                                      const std::vector<std::size_t>& n_grid, const McOptions& options);

struct ConditionOptions {
  std::vector<double> a_values{0.5, 1.0, 2.0};
  /// When the coefficients come from a truncated family, the closed-form
  /// side is recomputed at twice the length; a relative change above
  /// `divergence_threshold` marks the untruncated lag sum as divergent.
  std::optional<CoefficientFamily> family;
  double divergence_threshold = 0.05;
  /// Largest-n LHS must be within max(relative_tolerance * RHS, 3 SE) of RHS.
  double relative_tolerance = 0.10;
};

struct ConditionReport {
  std::vector<std::size_t> n_grid;
  std::vector<double> b_n;
  std::vector<double> a_values;
  std::vector<std::vector<Estimate>> lhs;  // [n][a]: n sum_{j>=2} Cov(f_a(X_1/B_n), f_a(X_j/B_n))
  std::vector<double> rhs;                 // [a]: sum_{j>=2} int f_a f_a d nu_{1,j}
  std::vector<std::size_t> lags;
  std::vector<double> rhs_per_lag;                 // [lag] at a = 1
  std::vector<std::vector<Estimate>> lhs_per_lag;  // [a][lag] at the largest n
  double lag_tail_fraction = 0.0;  // share of the doubled-length RHS beyond the kept lags
  bool rhs_finite = true;
  bool verdict = false;
  std::string reason;
};

ConditionReport condition_part_report(const MAProcessSpec& spec, const std::vector<std::size_t>& n_grid,
                                      const McOptions& options, const ConditionOptions& condition = {});

/// a -> sum_j g_j(a) over the lags 1..q.
struct TruncCovCurve {
  std::vector<double> a_grid;
  std::vector<double> values;
  std::vector<double> se;  // zero for closed-form curves
  std::size_t first_lag = 1;
  std::size_t last_lag = 1;
};

/// Monte Carlo curve sum_r Cov(f_a(X_1), f_a(X_{1+r})).
TruncCovCurve trunc_cov_curve_mc(const MAProcessSpec& spec, const std::vector<double>& a_grid,
                                 const McOptions& options);

/// Its large-a equivalent sum_r int f_a f_a d(pair measure), in X units.
TruncCovCurve trunc_cov_curve_exact(const MAProcessSpec& spec, const std::vector<double>& a_grid);

struct RvCheck {
  double slope = 0.0;
  double intercept = 0.0;
  double expected = 0.0;  // 2 - alpha
  bool verdict = false;
};

/// Log-log least-squares slope; pass iff |slope - (2 - alpha)| < tolerance.
RvCheck rv_exponent_check(const TruncCovCurve& curve, double alpha, double tolerance = 0.1);

/// H(x, y) = P(X_1 <= x, X_{1+lag} <= y) - P(X_1 <= x) P(X_{1+lag} <= y)
/// estimated on a rectangular grid. lag = 0 gives the pair (X_1, X_1).
struct HGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::vector<double>> values;  // [i][j] at (xs[i], ys[j])
  std::vector<std::vector<double>> se;
};

HGrid empirical_H(const MAProcessSpec& spec, std::size_t lag, const std::vector<double>& xs,
                  const std::vector<double>& ys, const McOptions& options);

/// 2-D trapezoid rule over the grid.
double integrate_H(const HGrid& grid);

struct IAPoint {
  double a = 0.0;
  double integral = 0.0;  // trapezoid integral of H over [-a, a]^2
  double integral_se = 0.0;
  double weighted = 0.0;  // a^{p-2} times the integral
};

struct IAResult {
  double value = 0.0;  // sup of `weighted`
  double exponent = 0.0;
  std::vector<IAPoint> points;
};

/// sup_{a in a_grid} a^{p-2} int_{[-a,a]^2} H. p defaults to alpha.
IAResult I_A_alpha(const MAProcessSpec& spec, std::size_t lag, double A, const std::vector<double>& a_grid,
                   const McOptions& options, std::optional<double> exponent = std::nullopt,
                   std::size_t grid_points = 41);

struct SpectralConditionSum {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> per_lag;  // spectral covariance of (X_1, X_{1+r}), r = 1..q
};

/// sum_{k>=2} int s_1 s_2 Gamma_{1,k}(ds) for alpha in (1, 2). With a family
/// the sum is also taken at twice the length to flag divergence.
SpectralConditionSum spectral_covariance_sum(const MAProcessSpec& spec,
                                             const std::optional<CoefficientFamily>& family = std::nullopt,
                                             double divergence_threshold = 0.05);

}  // namespace stablelab
