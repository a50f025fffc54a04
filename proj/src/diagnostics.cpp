#include "stablelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stablelab/errors.hpp"
#include "stablelab/montecarlo.hpp"
#include "stablelab/spectral.hpp"

namespace stablelab {

double truncate(double x, double a) {
  if (!(a > 0.0)) throw DomainError("truncation level must be positive");
  return std::clamp(x, -a, a);
}

namespace {

constexpr double kHalfPi = StableSampler::kPi / 2.0;

void check_reps(const McOptions& options) {
  if (options.reps < 1000) throw ContractError("Monte Carlo diagnostics need reps >= 1000");
}

std::size_t support_q(const MAProcessSpec& spec) { return spec.coeffs.size() - 1; }

Estimate scaled(Estimate e, double factor) { return {e.estimate * factor, std::abs(factor) * e.se}; }

double b_n_of(const MAProcessSpec& spec, std::size_t n) {
  const auto marginal = marginal_params(spec);
  return solve_bn(tail_constant_of(marginal), marginal, n).value;
}

// Closed-form int f_a f_a d nu_{1,1+r}, r = 1..q.
std::vector<double> limit_per_lag(const MAProcessSpec& spec, double a) {
  std::vector<double> out;
  for (std::size_t r = 1; r <= support_q(spec); ++r)
    out.push_back(truncated_levy_cov(normalized_pair_spectral(spec, r), a));
  return out;
}

void check_family(const MAProcessSpec& spec, const CoefficientFamily& family) {
  if (family_coefficients(family) != spec.coeffs)
    throw ContractError("coefficient family does not generate the process coefficients");
}

MAProcessSpec doubled(const MAProcessSpec& spec, CoefficientFamily family) {
  family.length *= 2;
  return {family_coefficients(family), spec.innovation};
}

}  // namespace

WindowSampler::WindowSampler(const MAProcessSpec& spec, std::size_t span, long long shared_lo, long long shared_hi,
                             Sampling sampling)
    : spec_(spec),
      sampler_(spec.innovation),
      span_(span),
      lo_(shared_lo),
      hi_(shared_hi),
      tilt_(sampling == Sampling::importance && shared_lo <= shared_hi) {
  validate(spec);
  const long long last = static_cast<long long>(support_q(spec) + span);
  if (tilt_ && (shared_lo < 0 || shared_hi > last)) throw ContractError("window sampler: shared range out of window");
  z_.resize(static_cast<std::size_t>(last + 1));
}

double WindowSampler::draw(RngStream& stream, std::vector<double>& x) {
  const std::size_t q = support_q(spec_);
  const double log_range = std::log(kHalfPi / kMinGap);
  long long tilted = -1;
  const long long shared = hi_ - lo_ + 1;
  if (tilt_) tilted = lo_ + std::min(shared - 1, static_cast<long long>(stream.uniform() * static_cast<double>(shared)));
  double rho_sum = 0.0;
  for (std::size_t m = 0; m < z_.size(); ++m) {
    const long long mm = static_cast<long long>(m);
    if (!tilt_ || mm < lo_ || mm > hi_) {
      z_[m] = sampler_(stream);
      continue;
    }
    double angle = 0.0;
    double gap = 0.0;
    if (mm == tilted) {
      gap = stream.uniform() < kMix ? kHalfPi * stream.uniform() : kMinGap * std::exp(log_range * stream.uniform());
      angle = stream.uniform() < 0.5 ? -(kHalfPi - gap) : kHalfPi - gap;
    } else {
      angle = StableSampler::kPi * (stream.uniform() - 0.5);
      gap = kHalfPi - std::abs(angle);
    }
    // density ratio of the defensive mixture to the uniform angle law
    rho_sum += kMix + (gap >= kMinGap ? (1.0 - kMix) * kHalfPi / (gap * log_range) : 0.0);
    z_[m] = sampler_.from_uniforms(angle, stream.exponential());
  }
  x.assign(span_ + 1, 0.0);
  for (std::size_t j = 0; j <= span_; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i <= q; ++i) v += spec_.coeffs[i] * z_[j + q - i];
    x[j] = v;
  }
  return tilt_ ? static_cast<double>(shared) / rho_sum : 1.0;
}

TruncCovTable trunc_cov_table(const MAProcessSpec& spec, const std::vector<std::size_t>& lags,
                              const std::vector<double>& levels, const McOptions& options) {
  validate(spec);
  check_reps(options);
  if (lags.empty() || levels.empty()) throw ContractError("trunc_cov_table: need at least one lag and one level");
  for (std::size_t r : lags)
    if (r < 1) throw ContractError("trunc_cov_table: lags must be >= 1");
  for (double l : levels)
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("truncation level must be positive");

  const std::size_t q = support_q(spec);
  const std::size_t span = *std::max_element(lags.begin(), lags.end());
  const long long min_lag = static_cast<long long>(*std::min_element(lags.begin(), lags.end()));
  // innovations seen by X_1 (z[0..q]) and by some X_{1+r} (z[r..r+q])
  const long long shared_lo = min_lag;
  const long long shared_hi = static_cast<long long>(q);

  const std::size_t per_level = 1 + 2 * lags.size();
  const std::size_t features = levels.size() * per_level;
  const auto grouped = grouped_monte_carlo(options.reps, features, options.groups, options.workers, [&] {
    return [&, sampler = WindowSampler(spec, span, shared_lo, shared_hi, options.sampling),
            x = std::vector<double>()](std::size_t rep, std::span<double> out) mutable {
      auto stream = RngStream::derive(options.seed, "trunc_cov", rep);
      const double w = sampler.draw(stream, x);
      for (std::size_t l = 0; l < levels.size(); ++l) {
        const double level = levels[l];
        const double f1 = std::clamp(x[0], -level, level);
        double* row = out.data() + l * per_level;
        row[0] = w * f1;
        for (std::size_t k = 0; k < lags.size(); ++k) {
          const double fj = std::clamp(x[lags[k]], -level, level);
          row[1 + 2 * k] = w * fj;
          row[2 + 2 * k] = w * f1 * fj;
        }
      }
    };
  });

  TruncCovTable table{levels, lags, {}, {}};
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::size_t base = l * per_level;
    std::vector<Estimate> row;
    for (std::size_t k = 0; k < lags.size(); ++k) {
      row.push_back(jackknife_groups(grouped, [base, k](std::span<const double> m) {
        return m[base + 2 + 2 * k] - m[base] * m[base + 1 + 2 * k];
      }));
    }
    table.cov.push_back(std::move(row));
    const std::size_t count = lags.size();
    table.lag_sum.push_back(jackknife_groups(grouped, [base, count](std::span<const double> m) {
      double s = 0.0;
      for (std::size_t k = 0; k < count; ++k) s += m[base + 2 + 2 * k] - m[base] * m[base + 1 + 2 * k];
      return s;
    }));
  }
  return table;
}

Estimate empirical_trunc_cov(const MAProcessSpec& spec, std::size_t lag, double a, const McOptions& options) {
  return trunc_cov_table(spec, {lag}, {a}, options).cov[0][0];
}

SingleLagTable single_lag_limit_check(const MAProcessSpec& spec, std::size_t lag, double a,
                                      const std::vector<std::size_t>& n_grid, const McOptions& options) {
  validate(spec);
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw ContractError("single_lag_limit_check: n_grid must be strictly increasing");
  if (!(a > 0.0)) throw DomainError("truncation level must be positive");
  std::vector<double> b(n_grid.size());
  std::vector<double> levels(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    b[i] = b_n_of(spec, n_grid[i]);
    levels[i] = a * b[i];
  }
  const auto table = trunc_cov_table(spec, {lag}, levels, options);
  const double limit = truncated_levy_cov(normalized_pair_spectral(spec, lag), a);
  SingleLagTable out{lag, a, {}};
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto e = scaled(table.cov[i][0], static_cast<double>(n_grid[i]) / (b[i] * b[i]));
    const double gap = limit > 0.0 ? std::abs(e.estimate - limit) / limit : std::abs(e.estimate);
    out.rows.push_back({n_grid[i], b[i], e.estimate, e.se, limit, gap});
  }
  return out;
}

ConditionReport condition_part_report(const MAProcessSpec& spec, const std::vector<std::size_t>& n_grid,
                                      const McOptions& options, const ConditionOptions& condition) {
  validate(spec);
  check_reps(options);
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()))
    throw ContractError("condition_part_report: n_grid must be increasing");
  if (condition.a_values.empty()) throw ContractError("condition_part_report: no truncation levels");

  ConditionReport report;
  report.n_grid = n_grid;
  report.a_values = condition.a_values;
  const std::size_t q = support_q(spec);
  for (std::size_t r = 1; r <= q; ++r) report.lags.push_back(r);

  report.rhs_per_lag = limit_per_lag(spec, 1.0);
  const double rhs_unit = std::accumulate(report.rhs_per_lag.begin(), report.rhs_per_lag.end(), 0.0);
  for (double a : condition.a_values) {
    if (!(a > 0.0)) throw DomainError("truncation level must be positive");
    double s = 0.0;
    for (std::size_t r = 1; r <= q; ++r) s += truncated_levy_cov(normalized_pair_spectral(spec, r), a);
    report.rhs.push_back(s);
  }

  if (condition.family) {
    check_family(spec, *condition.family);
    const auto longer = limit_per_lag(doubled(spec, *condition.family), 1.0);
    const double rhs_long = std::accumulate(longer.begin(), longer.end(), 0.0);
    report.lag_tail_fraction = rhs_long > 0.0 ? (rhs_long - rhs_unit) / rhs_long : 0.0;
    report.rhs_finite = report.lag_tail_fraction <= condition.divergence_threshold;
  }

  for (std::size_t n : n_grid) report.b_n.push_back(b_n_of(spec, n));

  if (q == 0) {
    report.lhs.assign(n_grid.size(), std::vector<Estimate>(condition.a_values.size(), Estimate{0.0, 0.0}));
    report.lhs_per_lag.assign(condition.a_values.size(), {});
  } else {
    std::vector<double> levels;
    for (std::size_t i = 0; i < n_grid.size(); ++i)
      for (double a : condition.a_values) levels.push_back(a * report.b_n[i]);
    const auto table = trunc_cov_table(spec, report.lags, levels, options);
    const std::size_t na = condition.a_values.size();
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const double factor = static_cast<double>(n_grid[i]) / (report.b_n[i] * report.b_n[i]);
      std::vector<Estimate> row;
      for (std::size_t k = 0; k < na; ++k) row.push_back(scaled(table.lag_sum[i * na + k], factor));
      report.lhs.push_back(std::move(row));
      if (i + 1 == n_grid.size()) {
        for (std::size_t k = 0; k < na; ++k) {
          std::vector<Estimate> per;
          for (const auto& e : table.cov[i * na + k]) per.push_back(scaled(e, factor));
          report.lhs_per_lag.push_back(std::move(per));
        }
      }
    }
  }

  if (!report.rhs_finite) {
    report.verdict = false;
    report.reason = "lag sum of the limit side diverges (doubling the length changes it by " +
                    std::to_string(report.lag_tail_fraction * 100.0) + "%)";
    return report;
  }
  report.verdict = true;
  const auto& last = report.lhs.back();
  for (std::size_t k = 0; k < condition.a_values.size(); ++k) {
    const double allowed = std::max(condition.relative_tolerance * report.rhs[k], 3.0 * last[k].se);
    if (std::abs(last[k].estimate - report.rhs[k]) > allowed) {
      report.verdict = false;
      report.reason = "a = " + std::to_string(condition.a_values[k]) + ": LHS " + std::to_string(last[k].estimate) +
                      " vs RHS " + std::to_string(report.rhs[k]);
      return report;
    }
  }
  report.reason = "LHS within tolerance of RHS at the largest n for every a";
  return report;
}

TruncCovCurve trunc_cov_curve_mc(const MAProcessSpec& spec, const std::vector<double>& a_grid,
                                 const McOptions& options) {
  validate(spec);
  const std::size_t q = support_q(spec);
  TruncCovCurve curve{a_grid, std::vector<double>(a_grid.size(), 0.0), std::vector<double>(a_grid.size(), 0.0), 1,
                      std::max<std::size_t>(q, 1)};
  if (q == 0) return curve;
  std::vector<std::size_t> lags(q);
  std::iota(lags.begin(), lags.end(), std::size_t{1});
  const auto table = trunc_cov_table(spec, lags, a_grid, options);
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    curve.values[i] = table.lag_sum[i].estimate;
    curve.se[i] = table.lag_sum[i].se;
  }
  return curve;
}

TruncCovCurve trunc_cov_curve_exact(const MAProcessSpec& spec, const std::vector<double>& a_grid) {
  validate(spec);
  const std::size_t q = support_q(spec);
  TruncCovCurve curve{a_grid, std::vector<double>(a_grid.size(), 0.0), std::vector<double>(a_grid.size(), 0.0), 1,
                      std::max<std::size_t>(q, 1)};
  for (std::size_t r = 1; r <= q; ++r) {
    const auto pair = pair_spectral(spec, r);
    for (std::size_t i = 0; i < a_grid.size(); ++i) curve.values[i] += truncated_levy_cov(pair, a_grid[i]);
  }
  return curve;
}

RvCheck rv_exponent_check(const TruncCovCurve& curve, double alpha, double tolerance) {
  const auto& a = curve.a_grid;
  if (a.size() < 5 || curve.values.size() != a.size())
    throw ContractError("rv_exponent_check: need at least 5 grid points");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || (i > 0 && !(a[i] > a[i - 1]))) throw ContractError("rv_exponent_check: a_grid must be increasing and positive");
    if (!(curve.values[i] > 0.0)) throw DomainError("rv_exponent_check: curve value at a = " + std::to_string(a[i]) + " is not positive");
  }
  if (a.back() / a.front() < 100.0 * (1.0 - 1e-12)) throw ContractError("rv_exponent_check: a_grid must span 2 decades");
  std::vector<double> x(a.size());
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[i] = std::log(a[i]);
    y[i] = std::log(curve.values[i]);
  }
  const auto fit = fit_line(x, y);
  RvCheck out{fit.slope, fit.intercept, 2.0 - alpha, false};
  out.verdict = std::abs(fit.slope - out.expected) < tolerance;
  return out;
}

namespace {

// Features: [X_1 <= x_i] (nx), [Y <= y_j] (ny), joint (nx * ny).
GroupedSums h_sums(const MAProcessSpec& spec, std::size_t lag, const std::vector<double>& xs,
                   const std::vector<double>& ys, const McOptions& options) {
  validate(spec);
  check_reps(options);
  if (xs.empty() || ys.empty()) throw ContractError("empirical_H: empty grid");
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  return grouped_monte_carlo(options.reps, nx + ny + nx * ny, options.groups, options.workers, [&] {
    return [&, sampler = WindowSampler(spec, lag, 1, 0, Sampling::plain), x = std::vector<double>()](
               std::size_t rep, std::span<double> out) mutable {
      auto stream = RngStream::derive(options.seed, "h_grid", rep);
      sampler.draw(stream, x);
      const double u = x[0];
      const double v = x[lag];
      for (std::size_t i = 0; i < nx; ++i) out[i] = u <= xs[i] ? 1.0 : 0.0;
      for (std::size_t j = 0; j < ny; ++j) out[nx + j] = v <= ys[j] ? 1.0 : 0.0;
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) out[nx + ny + i * ny + j] = out[i] * out[nx + j];
    };
  });
}

std::vector<double> trapezoid_weights(const std::vector<double>& g) {
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = (g[i + 1] - g[i]) / 2.0;
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace

HGrid empirical_H(const MAProcessSpec& spec, std::size_t lag, const std::vector<double>& xs,
                  const std::vector<double>& ys, const McOptions& options) {
  const auto grouped = h_sums(spec, lag, xs, ys, options);
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  HGrid grid{xs, ys, std::vector<std::vector<double>>(nx, std::vector<double>(ny)),
             std::vector<std::vector<double>>(nx, std::vector<double>(ny))};
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const auto e = jackknife_groups(grouped, [=](std::span<const double> m) {
        return m[nx + ny + i * ny + j] - m[i] * m[nx + j];
      });
      grid.values[i][j] = e.estimate;
      grid.se[i][j] = e.se;
    }
  }
  return grid;
}

double integrate_H(const HGrid& grid) {
  const auto wx = trapezoid_weights(grid.xs);
  const auto wy = trapezoid_weights(grid.ys);
  double s = 0.0;
  for (std::size_t i = 0; i < wx.size(); ++i)
    for (std::size_t j = 0; j < wy.size(); ++j) s += wx[i] * wy[j] * grid.values[i][j];
  return s;
}

IAResult I_A_alpha(const MAProcessSpec& spec, std::size_t lag, double A, const std::vector<double>& a_grid,
                   const McOptions& options, std::optional<double> exponent, std::size_t grid_points) {
  validate(spec);
  if (!(A > 0.0)) throw DomainError("I_A_alpha: A must be positive");
  if (a_grid.empty()) throw ContractError("I_A_alpha: empty a_grid");
  if (grid_points < 2) throw ContractError("I_A_alpha: need at least 2 grid points per axis");
  for (double a : a_grid)
    if (!(a >= A)) throw ContractError("I_A_alpha: a_grid must lie in [A, inf)");
  IAResult result;
  result.exponent = exponent.value_or(spec.innovation.alpha);
  result.value = -std::numeric_limits<double>::infinity();
  for (double a : a_grid) {
    const auto g = linspace(-a, a, grid_points);
    const auto grouped = h_sums(spec, lag, g, g, options);
    const auto w = trapezoid_weights(g);
    const std::size_t n = g.size();
    const auto e = jackknife_groups(grouped, [&](std::span<const double> m) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += w[i] * w[j] * (m[2 * n + i * n + j] - m[i] * m[n + j]);
      return s;
    });
    const double weighted = std::pow(a, result.exponent - 2.0) * e.estimate;
    result.points.push_back({a, e.estimate, e.se, weighted});
    result.value = std::max(result.value, weighted);
  }
  return result;
}

SpectralConditionSum spectral_covariance_sum(const MAProcessSpec& spec, const std::optional<CoefficientFamily>& family,
                                             double divergence_threshold) {
  validate(spec);
  const double alpha = spec.innovation.alpha;
  if (!(alpha > 1.0 && alpha < 2.0)) throw ContractError("spectral covariance sum requires alpha in (1, 2)");
  auto per_lag = [](const MAProcessSpec& s) {
    std::vector<double> out;
    for (std::size_t r = 1; r < s.coeffs.size(); ++r) out.push_back(spectral_covariance(pair_spectral(s, r).model.gamma, 1, 2));
    return out;
  };
  SpectralConditionSum out;
  out.per_lag = per_lag(spec);
  out.value = std::accumulate(out.per_lag.begin(), out.per_lag.end(), 0.0);
  if (family) {
    check_family(spec, *family);
    const auto longer = per_lag(doubled(spec, *family));
    const double total = std::accumulate(longer.begin(), longer.end(), 0.0);
    out.divergent = total > 0.0 && (total - out.value) / total > divergence_threshold;
  }
  return out;
}

}  // namespace stablelab
