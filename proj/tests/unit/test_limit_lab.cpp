#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "stablelab/errors.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/process.hpp"
#include "stablelab/stable.hpp"
#include "stablelab/stats.hpp"

using namespace stablelab;

namespace {

ExperimentConfig experiment(MAProcessSpec spec, std::vector<std::size_t> n_grid, std::size_t reps,
                            std::uint64_t seed) {
  ExperimentConfig c;
  c.spec = std::move(spec);
  c.n_grid = std::move(n_grid);
  c.reps = reps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("experiment validation") {
  const MAProcessSpec iid{{1.0}, {1.5, 0.0, 1.0, 0.0}};
  CHECK_THROWS_AS(validate(experiment(iid, {}, 2000, 1)), ContractError);
  CHECK_THROWS_AS(validate(experiment(iid, {100, 100}, 2000, 1)), ContractError);
  CHECK_THROWS_AS(validate(experiment(iid, {100}, 999, 1)), ContractError);
  auto neg = experiment(iid, {100}, 2000, 1);
  neg.a = -1.0;
  CHECK_THROWS_AS(validate(neg), ContractError);
  CHECK(split_truncation(experiment(iid, {100}, 2000, 1)) == doctest::Approx(std::pow(100.0, 1.0 / 1.5)));
  const auto g = default_lambda_grid();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == doctest::Approx(0.1));
  CHECK(g.back() == doctest::Approx(2.0));
}

TEST_CASE("normalized sums") {
  const MAProcessSpec ma{{1.0, 0.5}, {1.5, 0.0, 1.0, 0.0}};
  const auto one = normalized_sums(ma, 50, 2.0, 3000, 7, 1);
  const auto three = normalized_sums(ma, 50, 2.0, 3000, 7, 3);
  CHECK(one == three);
  // replicate i is the sum of the path on stream derive(seed, path_tag(n), i)
  auto stream = RngStream::derive(7, path_tag(50), 17);
  const auto path = simulate_path(ma, 50, stream);
  CHECK(one[17] == doctest::Approx(std::accumulate(path.begin(), path.end(), 0.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("verify_main on the i.i.d. case") {
  // strictly stable i.i.d.: S_n has exactly the law of n^{1/alpha} X_1
  const StableParams z{1.5, 0.0, 1.3, 0.0};
  auto cfg = experiment({{1.0}, z}, {50, 500}, 5000, 3);
  cfg.lambda_grid = {0.0, 0.5, 1.0};
  const auto rep = verify_main(cfg);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    const StableParams exact{1.5, 0.0, z.scale * std::pow(static_cast<double>(row.n), 1.0 / 1.5) / row.b_n, 0.0};
    const auto samples = normalized_sums(cfg.spec, row.n, row.b_n, cfg.reps, cfg.seed, 1);
    const auto ks = ks_one_sample(samples, [&](double x) { return cdf_stable(exact, x).value; });
    CHECK(ks.p_value > 1e-3);
    CHECK(row.ks == doctest::Approx(ks_against(samples, rep.limit, 1).statistic).epsilon(1e-12));
    CHECK(row.ks_p > 1e-3);
    CHECK(row.ecf_gap < 4.0 / std::sqrt(static_cast<double>(cfg.reps)));
    CHECK(std::abs(row.fitted.alpha - 1.5) < 0.1);
  }
  // the limit is the n -> infinity scale of the exact law
  const double big = 1e8;
  const double b = normalizing_constant(cfg.spec, static_cast<std::size_t>(big));
  CHECK(rep.limit.scale == doctest::Approx(z.scale * std::pow(big, 1.0 / 1.5) / b).epsilon(1e-3));

  SUBCASE("lambda = 0 alone gives an exactly zero ecf gap") {
    cfg.lambda_grid = {0.0};
    cfg.n_grid = {20};
    cfg.reps = 1000;
    CHECK(verify_main(cfg).rows[0].ecf_gap == 0.0);
  }
}

TEST_CASE("alpha = 1 identity") {
  auto cfg = experiment({{1.0, 0.5, 0.2}, {1.0, 0.0, 1.0, 0.0}}, {10, 100}, 5000, 4);
  const auto rows = verify_alpha1_identity(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.ks_p > 1e-3);
    CHECK(r.ecf_gap < 6.0 / std::sqrt(5000.0));
  }
  auto bad = cfg;
  bad.spec.innovation.alpha = 1.5;
  CHECK_THROWS_AS(verify_alpha1_identity(bad), ContractError);
}

TEST_CASE("tangent measures against the closed form") {
  SUBCASE("i.i.d. root is the limit") {
    const auto r = verify_tangent_convergence({{1.0}, {1.5, 0.0, 1.0, 0.0}}, {1, 10, 1000});
    for (const auto& row : r.rows) CHECK(row.gap <= 1e-12);
  }
  SUBCASE("MA(2) against partial-sum weights") {
    const std::vector<double> c{1.0, 0.5};
    const double alpha = 1.5;
    const MAProcessSpec spec{c, {alpha, 0.0, 1.0, 0.0}};
    const std::vector<std::size_t> blocks{10, 100, 1000, 10000};
    const auto r = verify_tangent_convergence(spec, blocks);
    CHECK(r.monotone);
    CHECK(r.rows.back().gap < 1e-3);
    // symmetric S alpha S: block sum has scale^alpha = sum_k |w_k|^alpha, with
    // w_k the partial coefficient sums hitting Z_k; the limit is (sum c) Z
    double marg = 0.0;
    for (double x : c) marg += std::pow(x, alpha);
    const StableParams marginal{alpha, 0.0, std::pow(marg, 1.0 / alpha), 0.0};
    const double unit = std::pow(tail_constant_of(marginal).tail_constant, -1.0 / alpha);
    const double total = c[0] + c[1];
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const double n = static_cast<double>(blocks[k]);
      // weights: Z_{1-1} gets c1 alone, interior gets c0 + c1, the last gets c0
      const double s_alpha = std::pow(c[1], alpha) + (n - 1.0) * std::pow(total, alpha) + std::pow(c[0], alpha);
      double gap = 0.0;
      for (double lambda : default_lambda_grid()) {
        const double t = lambda * unit;
        const double root = std::exp(-std::pow(t, alpha) * s_alpha / n);
        const double limit = std::exp(-std::pow(t * total, alpha));
        gap = std::max(gap, std::abs(root - limit));
      }
      CHECK(r.rows[k].gap == doctest::Approx(gap).epsilon(1e-8));
    }
  }
  SUBCASE("alpha = 1 root is exact, rounding does not break monotonicity") {
    const auto r = verify_tangent_convergence({{1.0, 0.2, 0.8}, {1.0, 0.0, 1.0, 0.0}}, {10, 100, 1000, 10000});
    CHECK(r.monotone);
    for (const auto& row : r.rows) CHECK(row.gap <= 1e-15);
  }
  CHECK_THROWS_AS(verify_tangent_convergence({{1.0}, {0.7, 0.0, 1.0, 0.3}}, {10}), ContractError);
  CHECK_THROWS_AS(verify_tangent_convergence({{1.0}, {1.5, 0.0, 1.0, 0.0}}, {}), ContractError);
}

TEST_CASE("truncation split") {
  SUBCASE("i.i.d. matches the exact independent probability") {
    auto cfg = experiment({{1.0}, {1.5, 0.0, 1.0, 0.0}}, {100, 1000}, 20000, 5);
    cfg.a = 2.0;
    for (const auto& row : truncation_split_check(cfg)) {
      CHECK(row.max_identity_error < 1e-9);
      CHECK(std::abs(row.p_nonzero_v - row.independent_exact) < 4.0 * row.se + 1e-12);
      CHECK(row.independent_exact <= row.union_bound);
      CHECK(row.within_bound);
    }
  }
  SUBCASE("huge a leaves V = 0") {
    auto cfg = experiment({{1.0, 0.5}, {1.5, 0.0, 1.0, 0.0}}, {100}, 5000, 6);
    cfg.a = 1e3;
    const auto row = truncation_split_check(cfg)[0];
    CHECK(row.p_nonzero_v < 1e-3);
    CHECK(row.union_bound < 1e-3);
  }
  SUBCASE("small a saturates the bound") {
    auto cfg = experiment({{1.0, 0.5}, {1.5, 0.0, 1.0, 0.0}}, {1000}, 2000, 7);
    cfg.a = 0.01;
    const auto row = truncation_split_check(cfg)[0];
    CHECK(row.p_nonzero_v == 1.0);
    CHECK(row.union_bound > 1.0);
    CHECK(row.within_bound);
  }
}

TEST_CASE("Newman gap") {
  NewmanConfig base;
  base.spec = {{1.0, 1.0}, {1.5, 0.0, 1.0, 0.0}};
  base.m = 10;
  base.block = 5;
  base.reps = 4000;
  base.seed = 9;
  SUBCASE("lambda = 0 is exactly zero") {
    auto c = base;
    c.lambda = 0.0;
    const auto r = newman_gap_check(c);
    CHECK(r.lhs.estimate == 0.0);
    CHECK(r.rhs.estimate == 0.0);
    CHECK(r.majorant == 0.0);
    CHECK(r.holds);
  }
  SUBCASE("one block is exactly zero") {
    auto c = base;
    c.m = 1;
    const auto r = newman_gap_check(c);
    CHECK(std::abs(r.lhs.estimate) < 1e-12);
    CHECK(std::abs(r.rhs.estimate) < 1e-12);
  }
  SUBCASE("i.i.d. blocks are independent") {
    auto c = base;
    c.spec = {{1.0}, {1.5, 0.0, 1.0, 0.0}};
    const auto r = newman_gap_check(c);
    CHECK(r.majorant == 0.0);
    CHECK(std::abs(r.rhs.estimate) < 4.0 * r.rhs.se);
    CHECK(r.holds);
  }
  SUBCASE("associated MA(2) holds and sits under the majorant") {
    const auto r = newman_gap_check(base);
    CHECK(r.holds);
    CHECK(r.rhs.estimate <= r.majorant + 3.0 * r.rhs.se);
  }
  auto bad = base;
  bad.m = 0;
  CHECK_THROWS_AS(newman_gap_check(bad), ContractError);
  bad = base;
  bad.a = 0.0;
  CHECK_THROWS_AS(newman_gap_check(bad), DomainError);
}

TEST_CASE("default Newman battery") {
  const auto b = default_newman_battery(3000, 2, 1);
  CHECK(b.size() == 20);
  std::set<std::string> labels;
  for (const auto& c : b) {
    labels.insert(c.label);
    CHECK(c.reps == 3000);
    CHECK(c.a == 1.0);
    for (double x : c.spec.coeffs) CHECK(x >= 0.0);
  }
  CHECK(labels.size() == 20);
}
