#include "stablelab/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "stablelab/errors.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// P(X > z) for the standard law (scale 1, location 0), alpha != 1, z > 0,
// from Zolotarev's integral over an angle interval of length D. The
// integrand moves monotonically between 0 and 1, with the transition where
// g = 1; far out in the tail it sits within ~z^{-alpha} of an endpoint. Each
// half of the interval is therefore parameterized by the distance v to its
// own endpoint, so the trigonometric factors keep full relative precision,
// and the part beyond the transition is integrated in log v.
Probability standard_upper_tail(double alpha, double beta, double z) {
  const double a_theta0 = std::atan(beta * std::tan(kPi * alpha / 2.0));
  const double theta0 = a_theta0 / alpha;
  const double length = kPi / 2.0 + theta0;
  if (!(length > 1e-15)) return {0.0, 0.0};
  // Gaps at the two ends; exactly zero for the totally skewed laws.
  const double h0 = (alpha < 1.0 && beta == 1.0) ? 0.0 : kPi / 2.0 - theta0;
  const double e0 = (alpha > 1.0 && beta == -1.0) ? 0.0 : (2.0 - alpha) * kPi / 2.0 - a_theta0;

  const double am1 = alpha - 1.0;
  const double log_const = std::log(std::cos(a_theta0)) / am1 + alpha / am1 * std::log(z);
  // phi: distance from the left end, d: distance from the right end.
  // Each factor has one form per end (e.g. cos(theta) = sin(d) = sin(h0 + phi))
  // so whichever end is near stays exact.
  auto log_g = [&](double phi, double d, bool from_left) {
    const double cos_theta = from_left ? std::sin(h0 + phi) : std::sin(d);
    const double sin_a = from_left ? std::sin(alpha * phi) : std::sin(e0 + alpha * d);
    const double last = from_left ? std::sin(h0 + (1.0 - alpha) * phi) : std::sin(e0 + am1 * d);
    return log_const + std::log(cos_theta) / am1 - alpha / am1 * std::log(sin_a) + std::log(last);
  };
  const bool small_alpha = alpha < 1.0;
  auto weight = [&](double lg) {
    if (std::isnan(lg)) return 0.0;
    const double g = std::exp(lg);
    return small_alpha ? -std::expm1(-g) : std::exp(-g);
  };

  const double half = 0.5 * length;
  double total = 0.0;
  double error = 0.0;
  for (const bool from_left : {true, false}) {
    auto lg_at = [&](double v) { return from_left ? log_g(v, length - v, true) : log_g(length - v, v, false); };
    auto f = [&](double v) { return v <= 0.0 ? 0.0 : weight(lg_at(v)); };
    // Near v = 0, log g -> +inf on the left half for alpha > 1 and on the
    // right half for alpha < 1; -inf otherwise.
    const bool rising = (from_left == !small_alpha);
    auto beyond = [&](double v) {
      const double lg = lg_at(v);
      return rising ? lg < 0.0 : lg > 0.0;
    };
    double root = half;
    if (beyond(half)) {
      double lo = 1e-300;
      double hi = half;
      if (beyond(lo)) {
        root = lo;
      } else {
        for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
          const double mid = std::sqrt(lo * hi);
          (beyond(mid) ? hi : lo) = mid;
        }
        root = std::sqrt(lo * hi);
      }
    }
    double err = 0.0;
    if (root > 0.0) {
      // Algebraic behaviour v^{alpha/(1-alpha)} at v = 0 is common here.
      thread_local boost::math::quadrature::tanh_sinh<double> endpoint_rule(12);
      total += endpoint_rule.integrate(f, 0.0, root, 1e-11, &err);
      error += err * root;
    }
    if (root < half) {
      auto in_log = [&](double s) {
        const double v = std::exp(s);
        return f(v) * v;
      };
      total += Kronrod::integrate(in_log, std::log(root), std::log(half), 12, 1e-12, &err);
      error += err;
    }
  }
  return {std::clamp(total / kPi, 0.0, 1.0), error / kPi};
}

}  // namespace

void validate(const StableParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.scale) ||
      !std::isfinite(p.location))
    throw DomainError("stable parameters must be finite");
  if (!(p.alpha > 0.0 && p.alpha < 2.0))
    throw DomainError("stable index alpha must lie in (0, 2), got " + std::to_string(p.alpha));
  if (!(std::abs(p.beta) <= 1.0))
    throw DomainError("skewness beta must lie in [-1, 1], got " + std::to_string(p.beta));
  if (!(p.scale > 0.0)) throw DomainError("scale must be positive, got " + std::to_string(p.scale));
  if (p.alpha == 1.0 && p.beta != 0.0)
    throw DomainError("alpha = 1 is only supported for symmetric laws (beta = 0)");
}

double radial_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("radial_constant: alpha outside (0, 2)");
  if (alpha == 1.0) return kPi / 2.0;
  return std::tgamma(1.0 - alpha) * std::cos(kPi * alpha / 2.0) / alpha;
}

std::complex<double> radial_integral(double alpha, double u) {
  if (u == 0.0) return {0.0, 0.0};
  const double au = std::abs(u);
  if (alpha == 1.0) return {-kPi / 2.0 * au, -u * std::log(au) + (1.0 - kEulerGamma) * u};
  const double c = radial_constant(alpha) * std::pow(au, alpha);
  return {-c, c * sign_of(u) * std::tan(kPi * alpha / 2.0)};
}

std::complex<double> log_cf_stable(const StableParams& params, double t) {
  validate(params);
  if (t == 0.0) return {0.0, 0.0};
  if (params.alpha == 1.0) return {-params.scale * std::abs(t), params.location * t};
  const double a = std::pow(params.scale * std::abs(t), params.alpha);
  return {-a, a * params.beta * sign_of(t) * std::tan(kPi * params.alpha / 2.0) + params.location * t};
}

std::complex<double> cf_stable(const StableParams& params, double t) {
  if (t == 0.0) {
    validate(params);
    return {1.0, 0.0};
  }
  return std::exp(log_cf_stable(params, t));
}

TailPair stable_tails(const StableParams& params, double x) {
  validate(params);
  const double z = (x - params.location) / params.scale;
  if (params.alpha == 1.0) {
    return {std::atan2(1.0, -z) / kPi, std::atan2(1.0, z) / kPi, 0.0};
  }
  if (z > 0.0) {
    const Probability up = standard_upper_tail(params.alpha, params.beta, z);
    return {1.0 - up.value, up.value, up.abs_error};
  }
  if (z < 0.0) {
    // X <= z  <=>  -X >= -z, and -X has skewness -beta.
    const Probability low = standard_upper_tail(params.alpha, -params.beta, -z);
    return {low.value, 1.0 - low.value, low.abs_error};
  }
  const double theta0 = std::atan(params.beta * std::tan(kPi * params.alpha / 2.0)) / params.alpha;
  const double lower = (kPi / 2.0 - theta0) / kPi;
  return {lower, 1.0 - lower, 0.0};
}

Probability cdf_stable(const StableParams& params, double x) {
  const TailPair tails = stable_tails(params, x);
  if (!(tails.abs_error <= kCdfTolerance))
    throw NumericError("cdf_stable: quadrature did not reach the documented tolerance", tails.lower,
                       tails.abs_error);
  return {tails.lower, tails.abs_error};
}

Probability cdf_stable_fourier(const StableParams& params, double x) {
  validate(params);
  const double alpha = params.alpha;
  const double k = alpha == 1.0 ? 0.0 : params.beta * std::tan(kPi * alpha / 2.0);
  const double z = (x - params.location) / params.scale;
  const double inv_alpha = 1.0 / alpha;
  // t = s^{1/alpha}: Im(e^{-itz} cf(t)) dt / t = e^{-s} sin(k s - z s^{1/alpha}) ds / (alpha s).
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(-s) * std::sin(k * s - z * std::pow(s, inv_alpha)) / (alpha * s);
  };
  boost::math::quadrature::tanh_sinh<double> near_zero;
  double err_total = 0.0;
  double total = near_zero.integrate(integrand, 0.0, 0.25, 1e-12, &err_total);
  const double breaks[] = {0.25, 1.0, 4.0, 12.0, 48.0};
  for (std::size_t i = 0; i + 1 < std::size(breaks); ++i) {
    double err = 0.0;
    total += Kronrod::integrate(integrand, breaks[i], breaks[i + 1], 15, 1e-12, &err);
    err_total += err;
  }
  const double value = 0.5 - total / kPi;
  const double abs_error = err_total / kPi + 1e-21;
  if (!(abs_error <= kCdfTolerance))
    throw NumericError("cdf_stable_fourier: quadrature did not converge", value, abs_error);
  return {std::clamp(value, 0.0, 1.0), abs_error};
}

MarginalTail tail_constant_of(const StableParams& params) {
  validate(params);
  const double c = std::pow(params.scale, params.alpha) / (params.alpha * radial_constant(params.alpha));
  return {params.alpha, c, c};
}

NormalizingConstant solve_bn(const MarginalTail& tail, const StableParams& params, unsigned long long n) {
  validate(params);
  if (tail.alpha != params.alpha || !(tail.tail_constant > 0.0))
    throw DomainError("solve_bn: tail does not belong to the given law");
  if (n == 0) throw DomainError("solve_bn: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double asymptotic = std::pow(nn * tail.tail_constant, 1.0 / params.alpha);
  if (n == 1) return {asymptotic, true};

  const double log_n = std::log(nn);
  auto excess = [&](double log_b) {
    const double b = std::exp(log_b);
    const double upper = stable_tails(params, b).upper;
    const double lower = stable_tails(params, -b).lower;
    return log_n + std::log(upper + lower);
  };
  double lo = std::log(asymptotic) - 1.0;
  double hi = std::log(asymptotic) + 1.0;
  for (int i = 0; i < 60 && excess(lo) <= 0.0; ++i) lo -= 2.0;
  for (int i = 0; i < 60 && excess(hi) >= 0.0; ++i) hi += 2.0;
  const double flo = excess(lo);
  const double fhi = excess(hi);
  if (!(flo > 0.0 && fhi < 0.0))
    throw NumericError("solve_bn: could not bracket n P(|X| > B) = 1", asymptotic, std::abs(hi - lo));

  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(
      excess, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iterations);
  return {std::exp(0.5 * (root.first + root.second)), false};
}

std::vector<double> default_ecf_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(0.05 * k);
  return grid;
}

StableParams fit_stable_ecf(std::span<const double> samples) {
  const auto grid = default_ecf_grid();
  return fit_stable_ecf(samples, grid);
}

StableParams fit_stable_ecf(std::span<const double> samples, std::span<const double> t_grid) {
  if (samples.size() < 1000) throw ContractError("fit_stable_ecf needs at least 1000 samples");
  if (t_grid.size() < 3) throw ContractError("fit_stable_ecf needs at least 3 grid points");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0) || (k > 0 && !(t_grid[k] > t_grid[k - 1])))
      throw ContractError("fit_stable_ecf: grid must be strictly positive and increasing");
  }
  std::vector<double> values(samples.begin(), samples.end());
  const double center = median(values);
  const double spread = 0.5 * (quantile(values, 0.75) - quantile(values, 0.25));
  if (!(spread > 0.0) || !std::isfinite(spread))
    throw ContractError("fit_stable_ecf: degenerate sample (zero interquartile range)");
  for (double& v : values) v = (v - center) / spread;

  const double n = static_cast<double>(values.size());
  std::vector<double> log_t;
  std::vector<double> log_log;
  std::vector<double> weights;
  std::vector<std::complex<double>> phis;
  for (double t : t_grid) {
    const auto phi = ecf(values, t);
    const double mod = std::abs(phi);
    if (mod < 1e-4)
      throw GridError("fit_stable_ecf: |ecf(" + std::to_string(t) + ")| below 1e-4; shrink the grid");
    if (mod >= 1.0) throw ContractError("fit_stable_ecf: degenerate sample (|ecf| = 1)");
    const double mod2 = std::abs(ecf(values, 2.0 * t));
    // Delta-method variance of log(-log|ecf|).
    const double var_mod = std::max(1e-12, (1.0 + mod2 - 2.0 * mod * mod) / (2.0 * n));
    const double denom = mod * std::log(mod);
    log_t.push_back(std::log(t));
    log_log.push_back(std::log(-std::log(mod)));
    weights.push_back(denom * denom / var_mod);
    phis.push_back(phi);
  }
  const LineFit line = fit_line(log_t, log_log, weights);
  const double alpha = std::clamp(line.slope, 0.05, 1.999);
  const double scale_z = std::exp(line.intercept / alpha);

  // Phase: arg phi(t) = location t + (scale t)^alpha beta tan(pi alpha / 2).
  std::vector<double> phase;
  double previous = 0.0;
  for (const auto& phi : phis) {
    double a = std::arg(phi);
    a += 2.0 * kPi * std::round((previous - a) / (2.0 * kPi));
    phase.push_back(a);
    previous = a;
  }
  const double tan_term = std::tan(kPi * alpha / 2.0);
  double beta = 0.0;
  double loc_z = 0.0;
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const double u = std::pow(scale_z * t, alpha) * tan_term;
    const double w = weights[k];
    s11 += w * t * t;
    s12 += w * t * u;
    s22 += w * u * u;
    r1 += w * t * phase[k];
    r2 += w * u * phase[k];
  }
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(tan_term) < 30.0 && det > 1e-12 * s11 * s22) {
    loc_z = (s22 * r1 - s12 * r2) / det;
    beta = std::clamp((s11 * r2 - s12 * r1) / det, -1.0, 1.0);
  } else {
    loc_z = r1 / s11;
  }
  StableParams fitted{alpha, beta, scale_z * spread, center + spread * loc_z};
  if (fitted.alpha == 1.0) fitted.beta = 0.0;
  return fitted;
}

std::vector<std::complex<double>> conv_power(const ConvPowerLaw& law, std::span<const double> t_grid) {
  if (!(law.exponent > 0.0) || !std::isfinite(law.exponent))
    throw DomainError("conv_power: exponent must be a positive real");
  std::vector<std::complex<double>> out(t_grid.size());

  if (law.base_exponent) {
    if (std::abs(law.base_exponent(0.0)) > 1e-12)
      throw ContractError("conv_power: characteristic exponent must vanish at 0");
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      out[i] = std::exp(law.exponent * law.base_exponent(t_grid[i]));
    return out;
  }
  if (!law.base_cf) throw ContractError("conv_power: no base law given");
  if (std::abs(law.base_cf(0.0) - std::complex<double>(1.0, 0.0)) > 1e-12)
    throw ContractError("conv_power: base cf must equal 1 at 0");

  // Track the continuous log along |t|, then use cf(-t) = conj cf(t).
  std::vector<std::size_t> order(t_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(t_grid[a]) < std::abs(t_grid[b]); });

  auto log_at = [&](double t, double reference_phase) {
    const auto v = law.base_cf(t);
    const double mod = std::abs(v);
    if (!(mod >= law.min_modulus))
      throw BranchError("conv_power: |cf(" + std::to_string(t) + ")| fell below the tracking threshold");
    double phase = std::arg(v);
    phase += 2.0 * kPi * std::round((reference_phase - phase) / (2.0 * kPi));
    return std::complex<double>(std::log(mod), phase);
  };
  // Advance the tracked log from (t0, l0) to t1, bisecting while the phase
  // step is too large to be unambiguous.
  auto advance = [&](auto&& self, double t0, std::complex<double> l0, double t1, int depth) -> std::complex<double> {
    const auto l1 = log_at(t1, l0.imag());
    if (std::abs(l1.imag() - l0.imag()) <= kPi / 4.0) return l1;
    if (depth > 48) throw BranchError("conv_power: phase tracking did not resolve");
    const double tm = 0.5 * (t0 + t1);
    const auto lm = self(self, t0, l0, tm, depth + 1);
    return self(self, tm, lm, t1, depth + 1);
  };

  double t_prev = 0.0;
  std::complex<double> l_prev{0.0, 0.0};
  for (std::size_t idx : order) {
    const double at = std::abs(t_grid[idx]);
    if (at != t_prev) {
      l_prev = advance(advance, t_prev, l_prev, at, 0);
      t_prev = at;
    }
    const auto value = std::exp(law.exponent * l_prev);
    out[idx] = t_grid[idx] < 0.0 ? std::conj(value) : value;
  }
  return out;
}

StableSampler::StableSampler(const StableParams& params) : params_(params) {
  validate(params);
  if (params.alpha == 1.0) {
    cauchy_ = true;
    return;
  }
  const double zeta = params.beta * std::tan(kPi * params.alpha / 2.0);
  shift_ = std::atan(zeta) / params.alpha;
  log_scale_ = std::log1p(zeta * zeta) / (2.0 * params.alpha);
  inv_alpha_ = 1.0 / params.alpha;
  tail_power_ = (1.0 - params.alpha) / params.alpha;
}

double StableSampler::from_uniforms(double angle, double w) const {
  if (cauchy_) return params_.scale * std::tan(angle) + params_.location;
  const double a = params_.alpha * (angle + shift_);
  const double s = std::sin(a);
  const double c1 = std::cos(angle);
  const double c2 = std::max(std::cos(angle - a), std::numeric_limits<double>::min());
  const double log_mag =
      log_scale_ + std::log(std::abs(s)) - inv_alpha_ * std::log(c1) + tail_power_ * (std::log(c2) - std::log(w));
  return params_.scale * std::copysign(std::exp(log_mag), s) + params_.location;
}

std::vector<double> sample_stable(const StableParams& params, std::size_t count, RngStream& stream) {
  if (count == 0) throw ContractError("sample_stable: count must be >= 1");
  const StableSampler draw(params);
  std::vector<double> out(count);
  for (double& v : out) v = draw(stream);
  return out;
}

}  // namespace stablelab
