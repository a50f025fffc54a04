#include "stablelab/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstdio>
#include <numeric>

#include "stablelab/errors.hpp"
#include "stablelab/montecarlo.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/spectral.hpp"

namespace stablelab {

std::vector<double> default_lambda_grid() {
  std::vector<double> g(20);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.1 * static_cast<double>(i + 1);
  return g;
}

void validate(const ExperimentConfig& config) {
  validate(config.spec);
  const auto& g = config.n_grid;
  if (g.empty()) throw ContractError("experiment: n_grid is empty");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] < 1 || (i > 0 && g[i] <= g[i - 1])) throw ContractError("experiment: n_grid must be strictly increasing and >= 1");
  if (config.reps < 1000) throw ContractError("experiment: reps must be >= 1000");
  if (!(config.a >= 0.0) || !std::isfinite(config.a)) throw ContractError("experiment: a must be >= 0");
}

double split_truncation(const ExperimentConfig& config) {
  return config.a > 0.0 ? config.a : std::pow(100.0, 1.0 / config.spec.innovation.alpha);
}

std::string path_tag(std::size_t n) { return "path/n=" + std::to_string(n); }

double normalizing_constant(const MAProcessSpec& spec, std::size_t n) {
  const auto marginal = marginal_params(spec);
  return solve_bn(tail_constant_of(marginal), marginal, n).value;
}

std::vector<double> normalized_sums(const MAProcessSpec& spec, std::size_t n, double b_n, std::size_t reps,
                                    std::uint64_t seed, unsigned workers) {
  validate(spec);
  const StableSampler sampler(spec.innovation);
  const std::string tag = path_tag(n);
  std::vector<double> out(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    thread_local std::vector<double> z;
    thread_local std::vector<double> path;
    auto stream = RngStream::derive(seed, tag, i);
    simulate_path_into(spec, sampler, n, stream, z, path);
    double s = 0.0;
    for (double x : path) s += x;
    out[i] = s / b_n;
  });
  return out;
}

KsResult ks_against(std::vector<double> samples, const StableParams& law, unsigned workers) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> f(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) { f[i] = cdf_stable(law, samples[i]).value; });
  return ks_from_sorted_cdf(f);
}

ConvergenceReport verify_main(const ExperimentConfig& config) {
  validate(config);
  ConvergenceReport report{limit_mu_inf(config.spec), {}};
  for (std::size_t n : config.n_grid) {
    ConvergenceRow row;
    row.n = n;
    row.b_n = normalizing_constant(config.spec, n);
    const auto samples = normalized_sums(config.spec, n, row.b_n, config.reps, config.seed, config.workers);
    const auto ks = ks_against(samples, report.limit, config.workers);
    row.ks = ks.statistic;
    row.ks_p = ks.p_value;
    for (double lambda : config.lambda_grid)
      row.ecf_gap = std::max(row.ecf_gap, std::abs(ecf(samples, lambda) - cf_stable(report.limit, lambda)));
    row.fitted = fit_stable_ecf(samples);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<Alpha1Row> verify_alpha1_identity(const ExperimentConfig& config) {
  validate(config);
  if (config.spec.innovation.alpha != 1.0)
    throw ContractError("alpha1 identity needs alpha = 1 (got alpha = " + std::to_string(config.spec.innovation.alpha) + ")");
  const StableSampler sampler(config.spec.innovation);
  std::vector<double> single(config.reps);
  parallel_for(config.reps, config.workers, [&](std::size_t i) {
    thread_local std::vector<double> z;
    thread_local std::vector<double> path;
    auto stream = RngStream::derive(config.seed, "alpha1/x1", i);
    simulate_path_into(config.spec, sampler, 1, stream, z, path);
    single[i] = path[0];
  });
  std::vector<Alpha1Row> rows;
  for (std::size_t n : config.n_grid) {
    const auto sums = normalized_sums(config.spec, n, static_cast<double>(n), config.reps, config.seed, config.workers);
    Alpha1Row row;
    row.n = n;
    const auto ks = ks_two_sample(sums, single);
    row.ks = ks.statistic;
    row.ks_p = ks.p_value;
    for (double lambda : config.lambda_grid)
      row.ecf_gap = std::max(row.ecf_gap, std::abs(ecf(sums, lambda) - ecf(single, lambda)));
    rows.push_back(row);
  }
  return rows;
}

TangentReport verify_tangent_convergence(const MAProcessSpec& spec, const std::vector<std::size_t>& block_grid,
                                         const std::vector<double>& lambda_grid) {
  validate(spec);
  const auto& z = spec.innovation;
  if (z.alpha < 1.0 && z.location != 0.0)
    throw ContractError("tangent check needs a strictly stable innovation (location 0 for alpha < 1)");
  if (block_grid.empty()) throw ContractError("tangent check: empty N grid");
  TangentReport report;
  report.limit = limit_mu_inf(spec);
  const double c = tail_constant_of(marginal_params(spec)).tail_constant;
  const double unit = std::pow(c, -1.0 / z.alpha);
  std::vector<double> t(lambda_grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = lambda_grid[k] * unit;
  for (std::size_t block : block_grid) {
    const auto law = sum_spectral(spec, block);
    ConvPowerLaw power{[law](double s) { return cf_stable(law, s); }, 1.0 / static_cast<double>(block),
                       [law](double s) { return log_cf_stable(law, s); }};
    const auto root = conv_power(power, t);
    double gap = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) gap = std::max(gap, std::abs(root[k] - cf_stable(report.limit, lambda_grid[k])));
    // a few ulps of slack: at alpha = 1 the gap is exactly 0 up to rounding
    if (!report.rows.empty() && gap > report.rows.back().gap + 8.0 * std::numeric_limits<double>::epsilon())
      report.monotone = false;
    report.rows.push_back({block, gap});
  }
  return report;
}

std::vector<SplitRow> truncation_split_check(const ExperimentConfig& config) {
  validate(config);
  const double a = split_truncation(config);
  const auto marginal = marginal_params(config.spec);
  const StableSampler sampler(config.spec.innovation);
  std::vector<SplitRow> rows;
  for (std::size_t n : config.n_grid) {
    SplitRow row;
    row.n = n;
    row.b_n = normalizing_constant(config.spec, n);
    const double b = row.b_n;
    std::vector<double> hit(config.reps);
    std::vector<double> err(config.reps);
    const std::string tag = path_tag(n);
    parallel_for(config.reps, config.workers, [&](std::size_t i) {
      thread_local std::vector<double> z;
      thread_local std::vector<double> path;
      auto stream = RngStream::derive(config.seed, tag, i);
      simulate_path_into(config.spec, sampler, n, stream, z, path);
      double s = 0.0;
      double t = 0.0;
      double v = 0.0;
      bool big = false;
      for (double x : path) {
        s += x;
        const double u = x / b;
        const double f = std::clamp(u, -a, a);
        t += f;
        v += u - f;
        big = big || std::abs(u) > a;
      }
      hit[i] = big ? 1.0 : 0.0;
      err[i] = std::abs(t + v - s / b);
    });
    const double reps = static_cast<double>(config.reps);
    row.p_nonzero_v = std::accumulate(hit.begin(), hit.end(), 0.0) / reps;
    row.se = std::sqrt(row.p_nonzero_v * (1.0 - row.p_nonzero_v) / reps);
    const double p = stable_tails(marginal, a * b).upper + stable_tails(marginal, -a * b).lower;
    row.union_bound = static_cast<double>(n) * p;
    row.independent_exact = -std::expm1(static_cast<double>(n) * std::log1p(-p));
    row.max_identity_error = *std::max_element(err.begin(), err.end());
    row.within_bound = row.p_nonzero_v <= row.union_bound + 3.0 * row.se;
    rows.push_back(row);
  }
  return rows;
}

NewmanResult newman_gap_check(const NewmanConfig& config) {
  validate(config.spec);
  if (config.m < 1 || config.block < 1) throw ContractError("newman check: m and N must be >= 1");
  if (!(config.a > 0.0)) throw DomainError("truncation level must be positive");
  if (config.reps < 1000) throw ContractError("newman check: reps must be >= 1000");
  const std::size_t n = config.m * config.block;
  const double b = normalizing_constant(config.spec, n);
  const double a = config.a;
  const double lambda = config.lambda;
  const StableSampler sampler(config.spec.innovation);
  const double blocks = static_cast<double>(config.m);

  const auto grouped = grouped_monte_carlo(config.reps, 8, 100, config.workers, [&] {
    return [&, z = std::vector<double>(), path = std::vector<double>()](std::size_t rep,
                                                                        std::span<double> out) mutable {
      auto stream = RngStream::derive(config.seed, "newman", rep);
      simulate_path_into(config.spec, sampler, n, stream, z, path);
      double total = 0.0;
      double block_cos = 0.0;
      double block_sin = 0.0;
      double block_sum = 0.0;
      double block_sq = 0.0;
      for (std::size_t k = 0; k < config.m; ++k) {
        double t = 0.0;
        for (std::size_t j = k * config.block; j < (k + 1) * config.block; ++j) t += std::clamp(path[j] / b, -a, a);
        total += t;
        block_cos += std::cos(lambda * t);
        block_sin += std::sin(lambda * t);
        block_sum += t;
        block_sq += t * t;
      }
      out[0] = std::cos(lambda * total);
      out[1] = std::sin(lambda * total);
      out[2] = block_cos / blocks;
      out[3] = block_sin / blocks;
      out[4] = total;
      out[5] = total * total;
      out[6] = block_sum / blocks;
      out[7] = block_sq / blocks;
    };
  });

  const double m = blocks;
  auto lhs = [m](std::span<const double> v) {
    return std::abs(std::complex<double>(v[0], v[1]) - std::pow(std::complex<double>(v[2], v[3]), m));
  };
  auto rhs = [m, lambda](std::span<const double> v) {
    return lambda * lambda / 2.0 * ((v[5] - v[4] * v[4]) - m * (v[7] - v[6] * v[6]));
  };
  NewmanResult result;
  result.config = config;
  result.lhs = jackknife_groups(grouped, lhs);
  result.rhs = jackknife_groups(grouped, rhs);
  result.slack = jackknife_groups(grouped, [&](std::span<const double> v) { return rhs(v) - lhs(v); });
  result.holds = result.slack.estimate >= -3.0 * result.slack.se;

  const double alpha = config.spec.innovation.alpha;
  double lag_sum = 0.0;
  for (std::size_t l = 1; l < config.spec.coeffs.size(); ++l)
    lag_sum += static_cast<double>(std::min(config.block, l)) *
               truncated_levy_cov(normalized_pair_spectral(config.spec, l), 1.0);
  result.majorant = lambda * lambda * std::pow(a, 2.0 - alpha) * lag_sum / static_cast<double>(config.block);
  return result;
}

std::vector<NewmanConfig> default_newman_battery(std::size_t reps, std::uint64_t seed, unsigned workers) {
  struct Named {
    std::string name;
    MAProcessSpec spec;
  };
  const std::vector<Named> specs{
      {"iid-1.5", {{1.0}, {1.5, 0.0, 1.0, 0.0}}},
      {"ma2-1.5", {{1.0, 1.0}, {1.5, 0.0, 1.0, 0.0}}},
      {"ma3-1.5", {{1.0, 0.5, 0.25}, {1.5, 0.0, 1.0, 0.0}}},
      {"ma2-0.7-positive", {{1.0, 1.0}, {0.7, 1.0, 1.0, 0.0}}},
      {"ma2-1.0", {{1.0, 0.5}, {1.0, 0.0, 1.0, 0.0}}},
  };
  struct Setting {
    std::size_t m;
    std::size_t block;
    double lambda;
  };
  const std::vector<Setting> settings{{50, 20, 1.0}, {20, 10, 0.5}, {10, 10, 2.0}, {25, 4, 1.0}};
  std::vector<NewmanConfig> out;
  for (const auto& s : specs) {
    for (const auto& g : settings) {
      NewmanConfig c;
      c.spec = s.spec;
      c.m = g.m;
      c.block = g.block;
      c.a = 1.0;
      c.lambda = g.lambda;
      c.reps = reps;
      c.seed = seed;
      c.workers = workers;
      char buf[64];
      std::snprintf(buf, sizeof buf, " m=%zu N=%zu lambda=%g", g.m, g.block, g.lambda);
      c.label = s.name + buf;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace stablelab
