#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stablelab/rng.hpp"

namespace stablelab {

/// Univariate alpha-stable law in the 1-parameterization:
///   E exp(itX) = exp(-scale^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i location t),  a != 1
///   E exp(itX) = exp(-scale |t| + i location t),                                      a == 1
/// alpha = 1 is only admitted with beta = 0.
struct StableParams {
  double alpha = 1.5;
  double beta = 0.0;
  double scale = 1.0;
  double location = 0.0;

  bool operator==(const StableParams&) const = default;
};

/// Throws DomainError unless 0 < alpha < 2, |beta| <= 1, scale > 0, all
/// finite, and beta == 0 when alpha == 1.
void validate(const StableParams& params);

/// Tail of |X|: P(|X| > x) ~ tail_constant * x^-alpha. The slowly varying
/// factor of a stable marginal tends to a constant, recorded separately so
/// the general form stays visible to callers.
struct MarginalTail {
  double alpha = 0.0;
  double tail_constant = 0.0;
  double slowly_varying_limit = 0.0;
};

/// A probability together with the absolute error estimate of the
/// quadrature that produced it.
struct Probability {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Lower and upper tail at one point, each accurate relative to itself.
struct TailPair {
  double lower = 0.0;  // P(X <= x)
  double upper = 0.0;  // P(X > x)
  double abs_error = 0.0;
};

/// Target absolute accuracy of cdf_stable.
inline constexpr double kCdfTolerance = 1e-6;

/// C_alpha = Gamma(1 - alpha) cos(pi alpha / 2) / alpha (pi/2 at alpha = 1):
/// a one-sided Levy density w r^{-1-alpha} dr has scale^alpha = C_alpha w.
double radial_constant(double alpha);

/// Closed form of int_0^inf g(u, r) r^{-1-alpha} dr with the compensated
/// integrand g of the three alpha regimes (e^{iur}-1, minus iur 1{r<=1} at
/// alpha = 1, minus iur for alpha > 1).
std::complex<double> radial_integral(double alpha, double u);

std::complex<double> cf_stable(const StableParams& params, double t);

/// log of cf_stable, continuous in t (the characteristic exponent).
std::complex<double> log_cf_stable(const StableParams& params, double t);

/// P(X <= x). Evaluated from the Zolotarev integral representation on a
/// finite angle interval, split where the integrand turns over.
Probability cdf_stable(const StableParams& params, double x);

/// Both tails at x with relative accuracy in each; use this far out.
TailPair stable_tails(const StableParams& params, double x);

/// P(X <= x) by Gil-Pelaez sine-transform inversion of cf_stable. Slower and
/// only reliable for moderate |x - location| / scale; kept as an independent
/// route to the same numbers.
Probability cdf_stable_fourier(const StableParams& params, double x);

MarginalTail tail_constant_of(const StableParams& params);

struct NormalizingConstant {
  double value = 0.0;
  /// True when n P(|X| > B) = 1 has no finite positive root (n = 1) and the
  /// asymptotic (n c)^{1/alpha} was returned instead.
  bool asymptotic_fallback = false;
};

/// B_n with n P(|X_1| > B_n) = 1.
NormalizingConstant solve_bn(const MarginalTail& tail, const StableParams& params,
                             unsigned long long n);

/// {0.05, 0.10, ..., 1.00}.
std::vector<double> default_ecf_grid();

/// Empirical-characteristic-function regression estimator. The sample is
/// first standardized by median and half-IQR, so the fit is scale
/// equivariant; alpha and scale come from a weighted regression of
/// log(-log|ecf|) on log t, beta and location from the unwrapped phase.
StableParams fit_stable_ecf(std::span<const double> samples, std::span<const double> t_grid);
StableParams fit_stable_ecf(std::span<const double> samples);

/// mu^{*theta} for an infinitely divisible mu. If `base_exponent` is set it
/// is used as the continuous log of the cf directly; otherwise log base_cf is
/// tracked continuously from t = 0 (refining between grid points when the
/// phase moves too fast) and BranchError is thrown when |base_cf| drops
/// below `min_modulus`.
struct ConvPowerLaw {
  std::function<std::complex<double>(double)> base_cf;
  double exponent = 1.0;
  std::function<std::complex<double>(double)> base_exponent = {};
  double min_modulus = 1e-200;
};

std::vector<std::complex<double>> conv_power(const ConvPowerLaw& law, std::span<const double> t_grid);

/// Chambers-Mallows-Stuck sampler with the per-law constants hoisted.
class StableSampler {
 public:
  explicit StableSampler(const StableParams& params);

  double operator()(RngStream& stream) const {
    const double angle = kPi * (stream.uniform() - 0.5);
    return from_uniforms(angle, stream.exponential());
  }

  /// The CMS map applied to angle in (-pi/2, pi/2) and w ~ Exp(1).
  double from_uniforms(double angle, double w) const;

  const StableParams& params() const noexcept { return params_; }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  StableParams params_;
  double shift_ = 0.0;   // B = atan(beta tan(pi a/2)) / a
  double log_scale_ = 0.0;  // log of S = (1 + beta^2 tan^2)^{1/(2a)}
  double inv_alpha_ = 1.0;
  double tail_power_ = 0.0;  // (1 - a) / a
  bool cauchy_ = false;
};

std::vector<double> sample_stable(const StableParams& params, std::size_t count, RngStream& stream);

}  // namespace stablelab
