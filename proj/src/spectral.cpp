#include "stablelab/spectral.hpp"

#include <cmath>
#include <string>

#include "stablelab/errors.hpp"

namespace stablelab {

void validate(const DiscreteSpectralMeasure& gamma) {
  const std::size_t n = gamma.dimension();
  if (n == 0) throw DomainError("spectral measure: dimension must be >= 1 (shift vector is empty)");
  if (gamma.atoms.empty()) throw DomainError("spectral measure: no atoms");
  if (gamma.atoms.size() != gamma.weights.size())
    throw DomainError("spectral measure: atoms and weights differ in length");
  for (double b : gamma.shift)
    if (!std::isfinite(b)) throw DomainError("spectral measure: shift must be finite");
  for (std::size_t k = 0; k < gamma.atoms.size(); ++k) {
    const auto& s = gamma.atoms[k];
    if (s.size() != n)
      throw DomainError("spectral measure: atom " + std::to_string(k) + " has dimension " +
                        std::to_string(s.size()) + ", expected " + std::to_string(n));
    double norm2 = 0.0;
    for (double v : s) norm2 += v * v;
    if (!(std::abs(std::sqrt(norm2) - 1.0) <= 1e-12))
      throw DomainError("spectral measure: atom " + std::to_string(k) + " is not a unit vector");
    if (!(gamma.weights[k] > 0.0) || !std::isfinite(gamma.weights[k]))
      throw DomainError("spectral measure: weight " + std::to_string(k) + " must be positive and finite");
  }
}

void validate(const StableVectorModel& model) {
  if (!(model.alpha > 0.0 && model.alpha < 2.0)) throw DomainError("stable vector: alpha outside (0, 2)");
  validate(model.gamma);
  if (model.alpha != 1.0) return;
  const auto& g = model.gamma;
  for (std::size_t k = 0; k < g.atoms.size(); ++k) {
    bool matched = false;
    for (std::size_t m = 0; m < g.atoms.size() && !matched; ++m) {
      if (std::abs(g.weights[m] - g.weights[k]) > 1e-12) continue;
      bool opposite = true;
      for (std::size_t i = 0; i < g.dimension() && opposite; ++i)
        opposite = std::abs(g.atoms[m][i] + g.atoms[k][i]) <= 1e-12;
      matched = opposite;
    }
    if (!matched) throw DomainError("stable vector: alpha = 1 requires a symmetric spectral measure");
  }
}

void validate(const PairLevyMeasure& pair) {
  validate(pair.model);
  if (pair.model.gamma.dimension() != 2) throw DomainError("pair Levy measure must be two-dimensional");
}

bool is_associated(const DiscreteSpectralMeasure& gamma, double tol) {
  validate(gamma);
  for (const auto& s : gamma.atoms) {
    bool nonneg = true;
    bool nonpos = true;
    for (double v : s) {
      nonneg = nonneg && v >= -tol;
      nonpos = nonpos && v <= tol;
    }
    if (!nonneg && !nonpos) return false;
  }
  return true;
}

bool is_strictly_stable(const StableVectorModel& model) {
  validate(model);
  const auto& g = model.gamma;
  if (model.alpha != 1.0) {
    for (double b : g.shift)
      if (std::abs(b) > 1e-12) return false;
    return true;
  }
  for (std::size_t i = 0; i < g.dimension(); ++i) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.atoms.size(); ++k) m += g.weights[k] * g.atoms[k][i];
    if (std::abs(m) > 1e-10) return false;
  }
  return true;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::complex<double> log_cf_vector(const StableVectorModel& model, std::span<const double> t) {
  validate(model);
  const auto& g = model.gamma;
  if (t.size() != g.dimension()) throw ContractError("cf_vector: argument has the wrong dimension");
  std::complex<double> acc{0.0, dot(g.shift, t)};
  for (std::size_t k = 0; k < g.atoms.size(); ++k) acc += g.weights[k] * radial_integral(model.alpha, dot(g.atoms[k], t));
  return acc;
}

std::complex<double> cf_vector(const StableVectorModel& model, std::span<const double> t) {
  return std::exp(log_cf_vector(model, t));
}

StableParams project(const StableVectorModel& model, std::span<const double> direction) {
  validate(model);
  const auto& g = model.gamma;
  if (direction.size() != g.dimension()) throw ContractError("project: direction has the wrong dimension");
  double w_plus = 0.0;
  double w_minus = 0.0;
  for (std::size_t k = 0; k < g.atoms.size(); ++k) {
    const double u = dot(g.atoms[k], direction);
    const double m = g.weights[k] * std::pow(std::abs(u), model.alpha);
    (u > 0 ? w_plus : w_minus) += u == 0.0 ? 0.0 : m;
  }
  if (w_plus + w_minus <= 0.0) throw ContractError("project: degenerate projection");
  const double c = radial_constant(model.alpha);
  StableParams p;
  p.alpha = model.alpha;
  p.scale = std::pow(c * (w_plus + w_minus), 1.0 / model.alpha);
  p.beta = model.alpha == 1.0 ? 0.0 : (w_plus - w_minus) / (w_plus + w_minus);
  p.location = dot(g.shift, direction);
  return p;
}

std::vector<std::vector<double>> sample_vector(const StableVectorModel& model, std::size_t count,
                                               RngStream& stream) {
  if (!is_strictly_stable(model)) throw ContractError("sample_vector: model is not strictly stable");
  const auto& g = model.gamma;
  const double c = radial_constant(model.alpha);
  std::vector<StableSampler> rays;
  rays.reserve(g.atoms.size());
  for (double w : g.weights) {
    if (model.alpha == 1.0) {
      // Symmetric half of a +/- pair: Cauchy with scale (pi/2) w.
      rays.emplace_back(StableParams{1.0, 0.0, c * w, 0.0});
    } else {
      rays.emplace_back(StableParams{model.alpha, 1.0, std::pow(c * w, 1.0 / model.alpha), 0.0});
    }
  }
  std::vector<std::vector<double>> out(count, std::vector<double>(g.dimension(), 0.0));
  for (auto& x : out) {
    for (std::size_t k = 0; k < rays.size(); ++k) {
      const double y = rays[k](stream);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += y * g.atoms[k][i];
    }
  }
  return out;
}

double spectral_covariance(const DiscreteSpectralMeasure& gamma, std::size_t i, std::size_t j) {
  validate(gamma);
  if (i < 1 || j < 1 || i > gamma.dimension() || j > gamma.dimension())
    throw ContractError("spectral_covariance: coordinate index out of range 1.." + std::to_string(gamma.dimension()));
  double s = 0.0;
  for (std::size_t k = 0; k < gamma.atoms.size(); ++k) s += gamma.weights[k] * gamma.atoms[k][i - 1] * gamma.atoms[k][j - 1];
  return s;
}

double truncated_ray_integral(double alpha, double s1, double s2, double a) {
  if (!(a > 0.0)) throw DomainError("truncation level must be positive");
  if (s1 * s2 < 0.0) throw ContractError("truncated_levy_cov: atom with coordinates of opposite sign");
  const double p = std::abs(s1);
  const double q = std::abs(s2);
  const double hi = std::max(p, q);
  const double lo = std::min(p, q);
  if (lo == 0.0) return 0.0;
  // r < a/hi: both linear; a/hi < r < a/lo: one clipped; r > a/lo: both clipped.
  const double both_linear = p * q * std::pow(a / hi, 2.0 - alpha) / (2.0 - alpha);
  const double one_clipped = alpha == 1.0 ? a * lo * std::log(hi / lo)
                                          : a * lo * (std::pow(a / lo, 1.0 - alpha) - std::pow(a / hi, 1.0 - alpha)) /
                                                (1.0 - alpha);
  const double both_clipped = std::pow(a, 2.0 - alpha) * std::pow(lo, alpha) / alpha;
  return both_linear + one_clipped + both_clipped;
}

double truncated_levy_cov(const PairLevyMeasure& pair, double a) {
  validate(pair);
  const auto& g = pair.model.gamma;
  double total = 0.0;
  for (std::size_t k = 0; k < g.atoms.size(); ++k)
    total += g.weights[k] * truncated_ray_integral(pair.model.alpha, g.atoms[k][0], g.atoms[k][1], a);
  return total;
}

}  // namespace stablelab
