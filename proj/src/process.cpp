#include "stablelab/process.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "stablelab/errors.hpp"

namespace stablelab {

void validate(const MAProcessSpec& spec) {
  if (spec.coeffs.empty()) throw DomainError("MA process: coefficient list is empty");
  bool any = false;
  for (double c : spec.coeffs) {
    if (!std::isfinite(c) || c < 0.0) throw DomainError("MA process: coefficients must be finite and >= 0");
    any = any || c > 0.0;
  }
  if (!any) throw DomainError("MA process: coefficients are all zero");
  validate(spec.innovation);
  const double a = spec.innovation.alpha;
  if (a > 1.0 && spec.innovation.location != 0.0)
    throw DomainError("MA process: innovations must be centered (location 0) when alpha > 1");
}

std::vector<double> family_coefficients(const CoefficientFamily& family) {
  if (family.length == 0) throw DomainError("coefficient family: length must be >= 1");
  std::vector<double> c(family.length);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (family.kind == CoefficientFamily::Kind::geometric) {
      if (!(family.parameter > 0.0 && family.parameter < 1.0))
        throw DomainError("geometric family: rho must lie in (0, 1)");
      c[i] = std::pow(family.parameter, static_cast<double>(i));
    } else {
      if (!(family.parameter > 0.0)) throw DomainError("power family: theta must be positive");
      c[i] = std::pow(1.0 + static_cast<double>(i), -family.parameter);
    }
  }
  return c;
}

double truncation_scale_bound(const CoefficientFamily& family, double alpha) {
  const auto c = family_coefficients(family);
  double kept = 0.0;
  for (double v : c) kept += std::pow(v, alpha);
  const double len = static_cast<double>(family.length);
  double dropped = 0.0;
  if (family.kind == CoefficientFamily::Kind::geometric) {
    const double r = std::pow(family.parameter, alpha);
    dropped = std::pow(r, len) / (1.0 - r);
  } else {
    const double e = family.parameter * alpha;
    if (e <= 1.0) return std::numeric_limits<double>::infinity();
    // sum_{i >= L} (1 + i)^{-e} <= int_L^inf x^{-e} dx
    dropped = std::pow(len, 1.0 - e) / (e - 1.0);
  }
  return std::pow(1.0 + dropped / kept, 1.0 / alpha) - 1.0;
}

std::string to_string(CoefficientFamily::Kind kind) {
  return kind == CoefficientFamily::Kind::geometric ? "geometric" : "power";
}

CoefficientFamily::Kind family_kind_from_string(const std::string& name) {
  if (name == "geometric") return CoefficientFamily::Kind::geometric;
  if (name == "power") return CoefficientFamily::Kind::power;
  throw DomainError("unknown coefficient family '" + name + "' (expected geometric or power)");
}

void simulate_path_into(const MAProcessSpec& spec, const StableSampler& sampler, std::size_t n,
                        RngStream& stream, std::vector<double>& innovations, std::vector<double>& path) {
  const std::size_t q = spec.coeffs.size() - 1;
  innovations.resize(n + q);
  for (double& z : innovations) z = sampler(stream);
  path.assign(n, 0.0);
  // innovations[m] is Z_{m + 1 - q}; X_j uses Z_{j-i}, i.e. innovations[j - 1 + q - i].
  for (std::size_t j = 0; j < n; ++j) {
    double x = 0.0;
    for (std::size_t i = 0; i <= q; ++i) x += spec.coeffs[i] * innovations[j + q - i];
    path[j] = x;
  }
}

std::vector<double> simulate_path(const MAProcessSpec& spec, std::size_t n, RngStream& stream) {
  validate(spec);
  if (n == 0) throw ContractError("simulate_path: n must be >= 1");
  const StableSampler sampler(spec.innovation);
  std::vector<double> innovations;
  std::vector<double> path;
  simulate_path_into(spec, sampler, n, stream, innovations, path);
  return path;
}

StableParams marginal_params(const MAProcessSpec& spec) {
  validate(spec);
  const auto& z = spec.innovation;
  double power_sum = 0.0;
  double plain_sum = 0.0;
  for (double c : spec.coeffs) {
    power_sum += std::pow(c, z.alpha);
    plain_sum += c;
  }
  return {z.alpha, z.beta, z.scale * std::pow(power_sum, 1.0 / z.alpha), z.location * plain_sum};
}

InnovationWeights innovation_weights(const StableParams& innovation) {
  validate(innovation);
  const double total = std::pow(innovation.scale, innovation.alpha) / radial_constant(innovation.alpha);
  return {total * (1.0 + innovation.beta) / 2.0, total * (1.0 - innovation.beta) / 2.0};
}

namespace {

// Spectral model of sum_k v_k Z_k with the given vectors v_k (one per
// innovation) and shift.
StableVectorModel linear_model(const StableParams& innovation, const std::vector<std::vector<double>>& vectors,
                               std::vector<double> shift) {
  const auto w = innovation_weights(innovation);
  StableVectorModel model;
  model.alpha = innovation.alpha;
  model.gamma.shift = std::move(shift);
  for (const auto& v : vectors) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 == 0.0) continue;
    const double norm = std::sqrt(norm2);
    const double scale = std::pow(norm, innovation.alpha);
    std::vector<double> unit(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] / norm;
    if (w.plus > 0.0) {
      model.gamma.atoms.push_back(unit);
      model.gamma.weights.push_back(w.plus * scale);
    }
    if (w.minus > 0.0) {
      for (double& x : unit) x = -x;
      model.gamma.atoms.push_back(std::move(unit));
      model.gamma.weights.push_back(w.minus * scale);
    }
  }
  return model;
}

double coeff_at(const MAProcessSpec& spec, long long i) {
  if (i < 0 || i >= static_cast<long long>(spec.coeffs.size())) return 0.0;
  return spec.coeffs[static_cast<std::size_t>(i)];
}

}  // namespace

PairLevyMeasure pair_spectral(const MAProcessSpec& spec, std::size_t r) {
  validate(spec);
  if (r < 1) throw ContractError("pair_spectral: lag must be >= 1");
  const long long q = static_cast<long long>(spec.coeffs.size()) - 1;
  const long long lag = static_cast<long long>(r);
  std::vector<std::vector<double>> vectors;
  for (long long i = -lag; i <= q; ++i) vectors.push_back({coeff_at(spec, i), coeff_at(spec, i + lag)});
  const double b = marginal_params(spec).location;
  return {linear_model(spec.innovation, vectors, {b, b})};
}

PairLevyMeasure normalized_pair_spectral(const MAProcessSpec& spec, std::size_t r) {
  auto pair = pair_spectral(spec, r);
  const double c = tail_constant_of(marginal_params(spec)).tail_constant;
  for (double& w : pair.model.gamma.weights) w /= c;
  return pair;
}

double sum_coefficient_power(const MAProcessSpec& spec, std::size_t block) {
  validate(spec);
  if (block < 1) throw ContractError("block length must be >= 1");
  const double alpha = spec.innovation.alpha;
  const long long q = static_cast<long long>(spec.coeffs.size()) - 1;
  const long long n = static_cast<long long>(block);
  std::vector<double> prefix(spec.coeffs.size() + 1, 0.0);
  for (std::size_t i = 0; i < spec.coeffs.size(); ++i) prefix[i + 1] = prefix[i] + spec.coeffs[i];
  // a_{N,k} = sum of c_i over i in [max(0, 1-k), min(q, N-k)].
  auto a_of = [&](long long k) {
    const long long lo = std::max(0LL, 1 - k);
    const long long hi = std::min(q, n - k);
    return hi < lo ? 0.0 : prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
  };
  double total = 0.0;
  if (n > q) {
    // k in [1, N-q] see the full coefficient sum.
    total += static_cast<double>(n - q) * std::pow(prefix.back(), alpha);
    for (long long k = 1 - q; k <= 0; ++k) total += std::pow(a_of(k), alpha);
    for (long long k = n - q + 1; k <= n; ++k) total += std::pow(a_of(k), alpha);
  } else {
    for (long long k = 1 - q; k <= n; ++k) total += std::pow(a_of(k), alpha);
  }
  return total;
}

StableParams sum_spectral(const MAProcessSpec& spec, std::size_t block) {
  const double power = sum_coefficient_power(spec, block);
  const auto& z = spec.innovation;
  const double plain = std::accumulate(spec.coeffs.begin(), spec.coeffs.end(), 0.0);
  return {z.alpha, z.beta, z.scale * std::pow(power, 1.0 / z.alpha), z.location * static_cast<double>(block) * plain};
}

StableParams limit_mu_inf(const MAProcessSpec& spec) {
  validate(spec);
  const auto& z = spec.innovation;
  const double plain = std::accumulate(spec.coeffs.begin(), spec.coeffs.end(), 0.0);
  const double c = tail_constant_of(marginal_params(spec)).tail_constant;
  // S_n ~ scale sigma_Z n^{1/alpha} sum c, B_n ~ (n c)^{1/alpha}.
  StableParams limit{z.alpha, z.beta, z.scale * plain / std::pow(c, 1.0 / z.alpha), 0.0};
  if (z.alpha == 1.0) limit.location = z.location * plain / c;
  return limit;
}

StableVectorModel tangent_model(const MAProcessSpec& spec, std::size_t block) {
  validate(spec);
  if (block < 1) throw ContractError("tangent_model: N must be >= 1");
  const long long q = static_cast<long long>(spec.coeffs.size()) - 1;
  const long long n = static_cast<long long>(block);
  std::vector<std::vector<double>> vectors;
  for (long long k = 1 - q; k <= n; ++k) {
    std::vector<double> v(block);
    for (long long j = 1; j <= n; ++j) v[static_cast<std::size_t>(j - 1)] = coeff_at(spec, j - k);
    vectors.push_back(std::move(v));
  }
  const double b = marginal_params(spec).location;
  return linear_model(spec.innovation, vectors, std::vector<double>(block, b));
}

}  // namespace stablelab
