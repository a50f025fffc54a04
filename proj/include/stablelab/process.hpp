#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/stable.hpp"

namespace stablelab {

/// X_j = sum_{i=0..q} c_i Z_{j-i} with i.i.d. stable innovations Z.
/// Nonnegative coefficients make {X_j} associated.
struct MAProcessSpec {
  std::vector<double> coeffs;
  StableParams innovation;
};

/// coeffs nonempty, finite, >= 0, not all zero; innovation valid, with
/// location 0 when alpha is in (1, 2).
void validate(const MAProcessSpec& spec);

/// Truncated infinite moving averages: c_i = rho^i (geometric) or
/// c_i = (1 + i)^{-theta} (power), i = 0..length-1.
struct CoefficientFamily {
  enum class Kind { geometric, power };
  Kind kind = Kind::geometric;
  double parameter = 0.5;
  std::size_t length = 20;
};

std::vector<double> family_coefficients(const CoefficientFamily& family);

/// Upper bound on the relative error of the marginal scale caused by
/// truncating the family at `length` terms; +inf if the untruncated sum
/// sum c_i^alpha diverges.
double truncation_scale_bound(const CoefficientFamily& family, double alpha);

std::string to_string(CoefficientFamily::Kind kind);
CoefficientFamily::Kind family_kind_from_string(const std::string& name);

/// Length-n stationary path; the q innovations before time 1 serve as burn-in.
std::vector<double> simulate_path(const MAProcessSpec& spec, std::size_t n, RngStream& stream);

/// Same, with a sampler built once by the caller; `innovations` is scratch.
void simulate_path_into(const MAProcessSpec& spec, const StableSampler& sampler, std::size_t n,
                        RngStream& stream, std::vector<double>& innovations, std::vector<double>& path);

StableParams marginal_params(const MAProcessSpec& spec);

/// Levy measure of the innovation: mass w_plus on +1, w_minus on -1.
struct InnovationWeights {
  double plus = 0.0;
  double minus = 0.0;
};
InnovationWeights innovation_weights(const StableParams& innovation);

/// Spectral model of (X_1, X_{1+r}) in the units of X.
PairLevyMeasure pair_spectral(const MAProcessSpec& spec, std::size_t r);

/// nu_{1, 1+r}: the vague limit of n P((X_1, X_{1+r}) / B_n in .), i.e. the
/// pair measure divided by the marginal tail constant.
PairLevyMeasure normalized_pair_spectral(const MAProcessSpec& spec, std::size_t r);

/// sum_k a_{N,k}^alpha with a_{N,k} = sum_{j=1..N} c_{j-k}.
double sum_coefficient_power(const MAProcessSpec& spec, std::size_t block);

/// Law of S_N = X_1 + ... + X_N.
StableParams sum_spectral(const MAProcessSpec& spec, std::size_t block);

/// Law of lim S_n / B_n.
StableParams limit_mu_inf(const MAProcessSpec& spec);

/// Joint law of (X_1, ..., X_N) as a spectral model.
StableVectorModel tangent_model(const MAProcessSpec& spec, std::size_t block);

}  // namespace stablelab
