#pragma once

// Brute-force references used only by the tests.

#include <cmath>
#include <complex>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// (sin x - x) / x^3
inline double sin_minus_x_cubed(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-3) return -(1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)) / 6.0;
  return (std::sin(x) - x) / (x2 * x);
}

// int_0^inf g(u, r) r^{-1-alpha} dr by quadrature, with g = e^{iur} - 1
// compensated by iur (alpha > 1) or iur 1{r <= 1} (alpha = 1).
inline std::complex<double> radial_integral(double alpha, double u) {
  if (u == 0.0) return {0.0, 0.0};
  if (u < 0.0) return std::conj(radial_integral(alpha, -u));
  boost::math::quadrature::tanh_sinh<double> ts;
  const double p = -1.0 - alpha;
  const double near_re = ts.integrate(
      [&](double r) {
        if (r <= 0.0) return 0.0;
        const double h = std::sin(0.5 * u * r) / r;
        return -2.0 * h * h * std::pow(r, 1.0 - alpha);
      },
      0.0, 1.0);
  const double near_im = ts.integrate(
      [&](double r) {
        if (r <= 0.0) return 0.0;
        if (alpha < 1.0) return std::sin(u * r) / r * std::pow(r, -alpha);
        return sin_minus_x_cubed(u * r) * u * u * u * std::pow(r, 2.0 - alpha);
      },
      0.0, 1.0);

  boost::math::quadrature::ooura_fourier_cos<double> fc;
  boost::math::quadrature::ooura_fourier_sin<double> fs;
  auto decay = [&](double s) { return std::pow(1.0 + s, p); };
  const double ic = fc.integrate(decay, u).first;
  const double is = fs.integrate(decay, u).first;
  // r = 1 + s
  const double far_cos = std::cos(u) * ic - std::sin(u) * is;
  const double far_sin = std::sin(u) * ic + std::cos(u) * is;

  double re = near_re + far_cos - 1.0 / alpha;
  double im = near_im + far_sin;
  if (alpha > 1.0) im -= u / (alpha - 1.0);
  return {re, im};
}

}  // namespace oracle
