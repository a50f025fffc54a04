#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/stable.hpp"

namespace stablelab {

/// Finite spectral measure on the unit sphere of R^N plus a shift vector b.
struct DiscreteSpectralMeasure {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  std::vector<double> shift;

  std::size_t dimension() const noexcept { return shift.size(); }
};

/// Throws DomainError unless atoms are unit vectors (1e-12) of a common
/// dimension, weights are positive and finite, and shift has that dimension.
void validate(const DiscreteSpectralMeasure& gamma);

/// Jointly alpha-stable vector with characteristic function
///   exp( i<b,t> + sum_k w_k int_0^inf g(<t,s_k>, r) r^{-1-alpha} dr ).
struct StableVectorModel {
  double alpha = 1.5;
  DiscreteSpectralMeasure gamma;
};

/// Also requires a symmetric measure when alpha = 1.
void validate(const StableVectorModel& model);

/// The Levy measure of a pair, in polar form dr / r^{1+alpha} Gamma(ds).
struct PairLevyMeasure {
  StableVectorModel model;
};

void validate(const PairLevyMeasure& pair);

/// Every atom lies in [-tol, inf)^N or (-inf, tol]^N.
bool is_associated(const DiscreteSpectralMeasure& gamma, double tol = 0.0);

/// alpha != 1: shift vanishes (1e-12). alpha = 1: sum_k w_k s_k vanishes (1e-10).
bool is_strictly_stable(const StableVectorModel& model);

std::complex<double> log_cf_vector(const StableVectorModel& model, std::span<const double> t);
std::complex<double> cf_vector(const StableVectorModel& model, std::span<const double> t);

/// Law of <direction, X>.
StableParams project(const StableVectorModel& model, std::span<const double> direction);

/// Ray decomposition: one independent totally skewed (symmetric at alpha = 1)
/// scalar per atom, times the atom. Requires strict stability.
std::vector<std::vector<double>> sample_vector(const StableVectorModel& model, std::size_t count,
                                               RngStream& stream);

/// sum_k w_k s_k[i] s_k[j]; coordinates are numbered 1..N.
double spectral_covariance(const DiscreteSpectralMeasure& gamma, std::size_t i, std::size_t j);

/// int f_a(r s_1) f_a(r s_2) r^{-1-alpha} dr summed over atoms with weights,
/// i.e. int f_a(x_1) f_a(x_2) nu(dx). Atoms with s_1 s_2 < 0 are a contract
/// violation.
double truncated_levy_cov(const PairLevyMeasure& pair, double a);

/// Same integral for a single unit atom (s_1, s_2) with unit weight.
double truncated_ray_integral(double alpha, double s1, double s2, double a);

}  // namespace stablelab
