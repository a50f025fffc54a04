#include "stablelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stablelab/errors.hpp"

namespace stablelab {

std::complex<double> ecf(std::span<const double> samples, double t) {
  double re = 0.0;
  double im = 0.0;
  for (double x : samples) {
    re += std::cos(t * x);
    im += std::sin(t * x);
  }
  const double n = static_cast<double>(samples.size());
  return {re / n, im / n};
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ContractError("quantile of an empty sample");
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double vlo = values[lo];
  if (hi == lo) return vlo;
  const double vhi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.3) {
    // Small-x form converges faster: 1 - sqrt(2 pi)/x sum e^{-(2k-1)^2 pi^2 / (8x^2)}.
    const double c = -M_PI * M_PI / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k < 20; ++k) sum += std::exp(c * (2.0 * k - 1) * (2.0 * k - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / x * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Stephens' small-sample correction of the asymptotic distribution.
double ks_p_value(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ContractError("KS test on an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_from_sorted_cdf(std::span<const double> cdf_at_sorted) {
  if (cdf_at_sorted.empty()) throw ContractError("KS test on an empty sample");
  const double n = static_cast<double>(cdf_at_sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_at_sorted.size(); ++i) {
    const double f = cdf_at_sorted[i];
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ContractError("KS test on an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

std::size_t GroupedSums::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::vector<double> GroupedSums::means() const {
  const std::size_t n = total();
  if (n == 0 || sums.empty()) throw ContractError("means of an empty sample");
  std::vector<double> m(sums.front().size(), 0.0);
  for (const auto& g : sums)
    for (std::size_t c = 0; c < m.size(); ++c) m[c] += g[c];
  for (double& v : m) v /= static_cast<double>(n);
  return m;
}

JackknifeEstimate jackknife_groups(const GroupedSums& grouped,
                                   const std::function<double(std::span<const double>)>& statistic) {
  const std::size_t n = grouped.total();
  std::size_t used = 0;
  for (std::size_t c : grouped.counts) used += c > 0 ? 1 : 0;
  if (used < 2) throw ContractError("jackknife needs at least two nonempty groups");
  const std::size_t k = grouped.sums.front().size();
  std::vector<double> totals(k, 0.0);
  for (const auto& g : grouped.sums)
    for (std::size_t c = 0; c < k; ++c) totals[c] += g[c];

  std::vector<double> means(k);
  for (std::size_t c = 0; c < k; ++c) means[c] = totals[c] / static_cast<double>(n);
  const double full = statistic(means);

  std::vector<double> leave_out;
  leave_out.reserve(used);
  for (std::size_t g = 0; g < grouped.sums.size(); ++g) {
    if (grouped.counts[g] == 0) continue;
    const double m = static_cast<double>(n - grouped.counts[g]);
    for (std::size_t c = 0; c < k; ++c) means[c] = (totals[c] - grouped.sums[g][c]) / m;
    leave_out.push_back(statistic(means));
  }
  const double avg = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / static_cast<double>(used);
  double ss = 0.0;
  for (double v : leave_out) ss += (v - avg) * (v - avg);
  const double g = static_cast<double>(used);
  return {full, std::sqrt((g - 1.0) / g * ss)};
}

JackknifeEstimate jackknife_means(const std::vector<std::vector<double>>& columns,
                                  const std::function<double(std::span<const double>)>& statistic,
                                  std::size_t groups) {
  if (columns.empty() || columns.front().empty()) throw ContractError("jackknife of an empty sample");
  const std::size_t k = columns.size();
  const std::size_t n = columns.front().size();
  groups = std::clamp<std::size_t>(groups, 2, n);
  GroupedSums grouped(groups, k);
  for (std::size_t c = 0; c < k; ++c) {
    if (columns[c].size() != n) throw ContractError("jackknife columns differ in length");
    for (std::size_t i = 0; i < n; ++i) grouped.sums[i * groups / n][c] += columns[c][i];
  }
  for (std::size_t i = 0; i < n; ++i) ++grouped.counts[i * groups / n];
  return jackknife_groups(grouped, statistic);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("line fit needs >= 2 paired points");
  if (!weights.empty() && weights.size() != x.size()) throw ContractError("weight count mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ContractError("line fit with constant abscissa");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace stablelab
