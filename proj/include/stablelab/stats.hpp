#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stablelab {

std::complex<double> ecf(std::span<const double> samples, double t);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double p);

/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} e^{-2k^2x^2}.
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS distance; `samples` need not be sorted.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS from the model cdf evaluated at the sorted sample, for
/// callers that evaluate an expensive cdf in parallel.
KsResult ks_from_sorted_cdf(std::span<const double> cdf_at_sorted);

/// Delete-a-group jackknife of a smooth function of sample means.
/// `columns[k][i]` is feature k of replicate i.
struct JackknifeEstimate {
  double estimate = 0.0;
  double se = 0.0;
};
using Estimate = JackknifeEstimate;

/// Per-group column sums of replicate features, the sufficient statistic for
/// a delete-a-group jackknife of smooth functions of means.
struct GroupedSums {
  std::vector<std::vector<double>> sums;  // [group][feature]
  std::vector<std::size_t> counts;

  GroupedSums() = default;
  GroupedSums(std::size_t groups, std::size_t features)
      : sums(groups, std::vector<double>(features, 0.0)), counts(groups, 0) {}

  std::size_t total() const;
  std::vector<double> means() const;
};

JackknifeEstimate jackknife_groups(const GroupedSums& grouped,
                                   const std::function<double(std::span<const double>)>& statistic);

JackknifeEstimate jackknife_means(const std::vector<std::vector<double>>& columns,
                                  const std::function<double(std::span<const double>)>& statistic,
                                  std::size_t groups = 100);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares y = intercept + slope x; empty weights = OLS.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights = {});

}  // namespace stablelab
