#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stablelab/process.hpp"

namespace stablelab {

/// Right-continuous step function on [0, 1]: value values[k] on
/// [times[k], times[k+1]), the last value up to and including 1.
struct StepPath {
  std::vector<double> times;
  std::vector<double> values;
};

/// times strictly increasing in [0, 1] with times[0] = 0, one finite value
/// per time. DomainError otherwise.
void validate(const StepPath& path);

double value_at(const StepPath& path, double t);

/// Vertices of the completed graph in traversal order: horizontal moves
/// along constant pieces, vertical moves across jumps. Any monotone
/// traversal of this polyline is a parametric representation.
using ParamRep = std::vector<std::pair<double, double>>;  // (time, value)
ParamRep completed_graph(const StepPath& path);

/// S_n(t) = S_{floor(nt)} / b_n: jumps at k/n, S_n(0) = 0, S_n(1) = S_n / b_n.
StepPath build_partial_sum_path(std::span<const double> samples, double b_n);

double uniform_distance(const StepPath& x, const StepPath& y);

/// Is there an order-consistent matching of the completed graphs with both
/// coordinates within eps (Frechet decision with the max-norm)?
bool m1_within(const StepPath& x, const StepPath& y, double eps);

/// Is there an increasing homeomorphism lambda with |lambda - id| <= eps and
/// |x o lambda - y| <= eps (closure of the free space)?
bool j1_within(const StepPath& x, const StepPath& y, double eps);

/// Bisection on the decision procedures; the returned value is an upper
/// estimate within tol of the distance.
double m1_distance(const StepPath& x, const StepPath& y, double tol = 1e-3);
double j1_distance(const StepPath& x, const StepPath& y, double tol = 1e-3);

/// sup_t x(t).
double sup_functional(const StepPath& path);

struct FunctionalConfig {
  MAProcessSpec spec;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 10000;
  std::vector<double> t_points{0.0, 0.5, 1.0};
  std::vector<double> lambda_grid{0.5, 1.0, 2.0};
  std::vector<double> theta_grid{0.5, 1.0, 2.0};
  std::size_t oracle_grid = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct FunctionalRow {
  std::size_t n = 0;
  double b_n = 0.0;
  double ks_sup_oracle = 0.0;       // sup of S_n(.) vs sup of the fine-grid limit path (two-sample)
  double ks_terminal_oracle = 0.0;  // S_n(1) vs the limit path at 1 (two-sample)
  double ks_sup_limit = 0.0;        // sup of S_n(.) vs the limit cdf (one-sample)
  double ks_terminal_limit = 0.0;   // S_n(1) vs the limit cdf, same samples as verify_main
  bool sup_is_terminal = false;     // sup == S_n(1) on every replicate
  double increment_gap = 0.0;       // max over (lambda, theta) of |joint ecf - product|
  double increment_gap_se = 0.0;
  double majorant = 0.0;            // max |lambda theta| n^-1 sum_r r int f_1 f_1 d nu_{1,1+r}
};

struct FunctionalReport {
  StableParams limit;
  std::vector<FunctionalRow> rows;
  double oracle_doubling_ks = 0.0;  // sup law on the oracle grid vs twice as fine
};

FunctionalReport verify_functional(const FunctionalConfig& config);

}  // namespace stablelab
