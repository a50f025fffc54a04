#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/stable.hpp"
#include "stablelab/stats.hpp"

using namespace stablelab;

namespace {

constexpr double kPi = std::numbers::pi;

double ecf_se(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({2.0, 0.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate({0.0, 0.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate({1.5, 1.2, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate({1.5, 0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate({1.0, 0.3, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate({1.5, 0.0, 1.0, NAN}), DomainError);
  CHECK_NOTHROW(validate({1.0, 0.0, 2.0, -1.0}));
}

TEST_CASE("radial integral closed forms agree with quadrature in all three regimes") {
  for (double alpha : {0.4, 0.7, 1.0, 1.3, 1.5, 1.8}) {
    for (double u : {0.3, 1.3, -2.1, 7.0}) {
      const auto closed = radial_integral(alpha, u);
      const auto numeric = oracle::radial_integral(alpha, u);
      CAPTURE(alpha);
      CAPTURE(u);
      CHECK(std::abs(closed - numeric) < 1e-8 * (1.0 + std::abs(numeric)));
    }
  }
}

TEST_CASE("cf of a one-sided law matches the quadrature of its Levy integral") {
  // alpha = 0.7, beta = 1: Levy density w r^{-1-a} on (0, inf) with scale^a = C_a w.
  const StableParams p{0.7, 1.0, 1.0, 0.0};
  const double w = 1.0 / radial_constant(0.7);
  const double t = 1.3;
  const auto expected = std::exp(w * oracle::radial_integral(0.7, t));
  CHECK(std::abs(cf_stable(p, t) - expected) < 1e-8);
}

TEST_CASE("cf basic identities") {
  const StableParams skew{1.5, 0.5, 1.3, 0.2};
  CHECK(cf_stable(skew, 0.0) == std::complex<double>(1.0, 0.0));
  for (double t = -3.0; t <= 3.0; t += 0.25) {
    CHECK(std::abs(cf_stable(skew, -t) - std::conj(cf_stable(skew, t))) < 1e-15);
    CHECK(std::abs(cf_stable(skew, t)) == doctest::Approx(std::exp(-std::pow(1.3 * std::abs(t), 1.5))).epsilon(1e-13));
    const auto sym = cf_stable({1.5, 0.0, 1.3, 0.0}, t);
    CHECK(sym.imag() == 0.0);
    CHECK(sym.real() == doctest::Approx(std::exp(-std::pow(1.3 * std::abs(t), 1.5))).epsilon(1e-14));
  }
}

TEST_CASE("sampler: symmetry, positivity and empirical cf") {
  SUBCASE("symmetric sign balance") {
    RngStream rng(11);
    const auto xs = sample_stable({1.5, 0.0, 1.0, 0.0}, 100000, rng);
    double signs = 0.0;
    for (double x : xs) signs += x > 0 ? 1.0 : -1.0;
    CHECK(std::abs(signs / xs.size()) < 3.0 / std::sqrt(100000.0));
  }
  SUBCASE("totally skewed alpha < 1 is positive") {
    RngStream rng(12);
    const auto xs = sample_stable({0.7, 1.0, 1.0, 0.0}, 100000, rng);
    CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
  }
  SUBCASE("ecf within 4 standard errors") {
    RngStream rng(13);
    const StableParams p{1.5, 0.5, 1.0, 0.0};
    const auto xs = sample_stable(p, 100000, rng);
    for (int k = 1; k <= 20; ++k) {
      const double t = 0.1 * k;
      const auto diff = ecf(xs, t) - cf_stable(p, t);
      CAPTURE(t);
      CHECK(std::abs(diff.real()) < 4.0 * ecf_se(xs.size()));
      CHECK(std::abs(diff.imag()) < 4.0 * ecf_se(xs.size()));
    }
  }
  SUBCASE("determinism") {
    RngStream a(5), b(5);
    CHECK(sample_stable({1.2, -0.3, 2.0, 1.0}, 1000, a) == sample_stable({1.2, -0.3, 2.0, 1.0}, 1000, b));
  }
  SUBCASE("cauchy branch") {
    RngStream rng(14);
    const auto xs = sample_stable({1.0, 0.0, 2.0, 1.0}, 50000, rng);
    const auto ks = ks_one_sample(xs, [](double x) { return 0.5 + std::atan((x - 1.0) / 2.0) / kPi; });
    CHECK(ks.p_value > 1e-3);
  }
}

TEST_CASE("cdf: symmetry, monotonicity, tails, and the Fourier route") {
  const StableParams sym{1.5, 0.0, 1.0, 0.0};
  CHECK(cdf_stable({1.5, 0.0, 2.0, 3.0}, 3.0).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cdf_stable({0.7, 0.0, 1.0, 0.0}, 0.0).value == doctest::Approx(0.5).epsilon(1e-12));

  double prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = -20.0 + 0.4 * i;
    const double f = cdf_stable({1.3, 0.6, 1.0, 0.5}, x).value;
    CHECK(f >= prev);
    prev = f;
  }

  const double c = tail_constant_of(sym).tail_constant;
  const double upper = 1.0 - cdf_stable(sym, 50.0).value;
  CHECK(std::abs(upper / (c * std::pow(50.0, -1.5) / 2.0) - 1.0) < 0.05);

  for (const StableParams& p : {StableParams{1.5, 0.0, 1.0, 0.0}, StableParams{1.5, 0.5, 1.0, 0.0},
                                StableParams{0.7, 1.0, 1.0, 0.0}, StableParams{0.7, -0.4, 2.0, 1.0},
                                StableParams{1.8, -1.0, 1.0, 0.0}, StableParams{1.0, 0.0, 1.5, -1.0},
                                StableParams{1.2, 0.9, 0.5, 0.3}}) {
    for (double x : {-4.0, -1.0, -0.2, 0.0, 0.3, 1.0, 2.5, 6.0}) {
      CAPTURE(p.alpha);
      CAPTURE(p.beta);
      CAPTURE(x);
      const double a = cdf_stable(p, x).value;
      const double b = cdf_stable_fourier(p, x).value;
      CHECK(std::abs(a - b) < 1e-6);
    }
  }
}

TEST_CASE("cdf far out keeps relative accuracy") {
  const StableParams p{1.5, 0.0, 1.0, 0.0};
  const double c = tail_constant_of(p).tail_constant;
  for (double x : {1e4, 1e6, 1e10}) {
    const auto tails = stable_tails(p, x);
    CHECK(tails.upper / (c * std::pow(x, -1.5) / 2.0) == doctest::Approx(1.0).epsilon(0.01));
  }
  // The complementary tail of the skewed law decays faster than x^{-alpha}.
  const StableParams skew{1.5, 1.0, 1.0, 0.0};
  CHECK(stable_tails(skew, -10.0).lower * std::pow(10.0, 1.5) < 1e-6);
}

TEST_CASE("tail constant") {
  const StableParams p{1.5, 0.0, 1.0, 0.0};
  const double c = tail_constant_of(p).tail_constant;
  CHECK(tail_constant_of({1.5, 0.0, 2.0, 0.0}).tail_constant == doctest::Approx(std::pow(2.0, 1.5) * c).epsilon(1e-14));
  const double x = 1e3;
  const double numeric = std::pow(x, 1.5) * (1.0 - cdf_stable(p, x).value + cdf_stable(p, -x).value);
  CHECK(std::abs(numeric / c - 1.0) < 0.02);
  // classical constant: Gamma(a) sin(pi a / 2) / pi
  CHECK(c == doctest::Approx(std::tgamma(1.5) * std::sin(kPi * 0.75) / kPi * 2.0).epsilon(1e-13));

  const StableParams pos{0.7, 1.0, 1.0, 0.0};
  for (double y : {10.0, 100.0, 1000.0}) CHECK(cdf_stable(pos, -y).value * std::pow(y, 0.7) < 1e-12);
  const double cp = tail_constant_of(pos).tail_constant;
  const double y = 1e4;
  CHECK(stable_tails(pos, y).upper * std::pow(y, 0.7) / cp == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("normalizing constants") {
  const StableParams p{1.5, 0.0, 1.0, 0.0};
  const auto tail = tail_constant_of(p);
  const auto b1 = solve_bn(tail, p, 1);
  CHECK(b1.asymptotic_fallback);
  CHECK(b1.value == doctest::Approx(std::pow(tail.tail_constant, 1.0 / 1.5)).epsilon(1e-12));

  const auto b6 = solve_bn(tail, p, 1000000);
  CHECK_FALSE(b6.asymptotic_fallback);
  CHECK(std::abs(b6.value / std::pow(1e6 * tail.tail_constant, 1.0 / 1.5) - 1.0) < 0.01);
  const double exceed = stable_tails(p, b6.value).upper + stable_tails(p, -b6.value).lower;
  CHECK(1e6 * exceed == doctest::Approx(1.0).epsilon(1e-8));

  const double r = solve_bn(tail, p, 200000).value / solve_bn(tail, p, 100000).value;
  CHECK(std::abs(r / std::pow(2.0, 1.0 / 1.5) - 1.0) < 0.01);

  double prev = 0.0;
  for (unsigned long long n : {2ULL, 5ULL, 10ULL, 100ULL, 1000ULL}) {
    const double b = solve_bn(tail, p, n).value;
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("ecf fit") {
  RngStream rng(21);
  const auto xs = sample_stable({1.5, 0.0, 1.0, 0.0}, 100000, rng);
  const auto fit = fit_stable_ecf(xs);
  CHECK(fit.alpha >= 1.45);
  CHECK(fit.alpha <= 1.55);
  CHECK(fit.scale >= 0.95);
  CHECK(fit.scale <= 1.05);

  std::vector<double> doubled(xs);
  for (double& v : doubled) v *= 2.0;
  const auto fit2 = fit_stable_ecf(doubled);
  CHECK(fit2.scale / fit.scale == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit2.alpha == doctest::Approx(fit.alpha).epsilon(1e-9));

  CHECK_THROWS_AS(fit_stable_ecf(std::vector<double>(5000, 0.0)), ContractError);
  CHECK_THROWS_AS(fit_stable_ecf(std::vector<double>(10, 1.0)), ContractError);
  std::vector<double> two_point(2000);
  for (std::size_t i = 0; i < two_point.size(); ++i) two_point[i] = i % 2 ? 1.0 : -1.0;
  const std::vector<double> grid{0.5, 1.0, kPi / 2.0};  // ecf(t) = cos t vanishes at pi/2
  CHECK_THROWS_AS(fit_stable_ecf(two_point, grid), GridError);

  RngStream rng2(22);
  const auto skewed = sample_stable({1.3, 0.5, 2.0, 1.0}, 100000, rng2);
  const auto fs = fit_stable_ecf(skewed);
  CHECK(fs.alpha == doctest::Approx(1.3).epsilon(0.04));
  CHECK(fs.scale == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fs.beta == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("convolution powers") {
  const StableParams p{1.5, 0.4, 1.0, 0.0};
  std::vector<double> grid;
  for (int k = -40; k <= 40; ++k) grid.push_back(0.1 * k);
  ConvPowerLaw law{[&](double t) { return cf_stable(p, t); }, 1.0};
  const auto same = conv_power(law, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(same[i] - cf_stable(p, grid[i])) < 1e-14);

  const double n = 25.0;
  law.exponent = 1.0 / n;
  const auto root = conv_power(law, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(std::pow(root[i], n) - cf_stable(p, grid[i])) < 1e-10);
    CHECK(std::abs(root[i] - cf_stable(p, grid[i] / std::pow(n, 1.0 / 1.5))) < 1e-8);
  }

  // A law whose phase winds quickly: point mass at 40 convolved with a stable law.
  ConvPowerLaw shifted{[&](double t) { return cf_stable({1.5, 0.0, 0.3, 40.0}, t); }, 0.5};
  const auto half = conv_power(shifted, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(half[i] - cf_stable({1.5, 0.0, 0.3 * std::pow(0.5, 1.0 / 1.5), 20.0}, grid[i])) < 1e-10);

  ConvPowerLaw vanishing{[](double t) { return std::complex<double>(std::exp(-t * t * 400.0), 0.0); }, 0.5};
  CHECK_THROWS_AS(conv_power(vanishing, grid), BranchError);

  ConvPowerLaw by_exponent{nullptr, 0.5, [&](double t) { return log_cf_stable(p, t) * 1e4; }};
  const auto via_exp = conv_power(by_exponent, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(via_exp[i] - std::exp(0.5e4 * log_cf_stable(p, grid[i]))) < 1e-14);
}
