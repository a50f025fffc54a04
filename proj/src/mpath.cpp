#include "stablelab/mpath.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "stablelab/errors.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

void validate(const StepPath& path) {
  if (path.times.empty()) throw DomainError("step path: no segments");
  if (path.times.size() != path.values.size()) throw DomainError("step path: times and values differ in length");
  if (path.times.front() != 0.0) throw DomainError("step path: first time must be 0");
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    if (!std::isfinite(path.values[k])) throw DomainError("step path: value " + std::to_string(k) + " is not finite");
    if (!(path.times[k] <= 1.0)) throw DomainError("step path: times must lie in [0, 1]");
    if (k > 0 && !(path.times[k] > path.times[k - 1])) throw DomainError("step path: times must be strictly increasing");
  }
}

double value_at(const StepPath& path, double t) {
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  if (it == path.times.begin()) throw ContractError("value_at: time before 0");
  return path.values[static_cast<std::size_t>(it - path.times.begin()) - 1];
}

ParamRep completed_graph(const StepPath& path) {
  validate(path);
  ParamRep g;
  auto push = [&g](double t, double v) {
    if (g.empty() || g.back().first != t || g.back().second != v) g.emplace_back(t, v);
  };
  push(0.0, path.values[0]);
  for (std::size_t k = 1; k < path.times.size(); ++k) {
    push(path.times[k], path.values[k - 1]);
    push(path.times[k], path.values[k]);
  }
  push(1.0, path.values.back());
  if (g.size() == 1) g.push_back(g.front());
  return g;
}

StepPath build_partial_sum_path(std::span<const double> samples, double b_n) {
  if (samples.empty()) throw ContractError("partial-sum path: need at least one sample");
  if (!(b_n > 0.0)) throw DomainError("partial-sum path: b_n must be positive");
  const std::size_t n = samples.size();
  StepPath p;
  p.times.resize(n + 1);
  p.values.resize(n + 1);
  p.times[0] = 0.0;
  p.values[0] = 0.0;
  double s = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    s += samples[k - 1];
    p.times[k] = static_cast<double>(k) / static_cast<double>(n);
    p.values[k] = s / b_n;
  }
  p.times[n] = 1.0;
  return p;
}

double uniform_distance(const StepPath& x, const StepPath& y) {
  validate(x);
  validate(y);
  std::vector<double> t = x.times;
  t.insert(t.end(), y.times.begin(), y.times.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  double d = 0.0;
  for (double s : t) d = std::max(d, std::abs(value_at(x, s) - value_at(y, s)));
  return d;
}

namespace {

struct Interval {
  double lo = 1.0;
  double hi = 0.0;
  bool empty() const { return lo > hi; }
};

// {s in [0,1] : max-norm distance from p to a + s (b - a) <= eps}
Interval free_interval(std::pair<double, double> p, std::pair<double, double> a, std::pair<double, double> b,
                       double eps) {
  Interval out{0.0, 1.0};
  auto clip = [&](double pc, double ac, double bc) {
    const double d = bc - ac;
    if (d == 0.0) {
      if (std::abs(pc - ac) > eps) out = {1.0, 0.0};
      return;
    }
    double s1 = (pc - eps - ac) / d;
    double s2 = (pc + eps - ac) / d;
    if (s1 > s2) std::swap(s1, s2);
    out.lo = std::max(out.lo, s1);
    out.hi = std::min(out.hi, s2);
  };
  clip(p.first, a.first, b.first);
  clip(p.second, a.second, b.second);
  return out;
}

double max_norm(std::pair<double, double> a, std::pair<double, double> b) {
  return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

// Alt-Godau reachability for polylines P (k segments) and Q (l segments).
bool frechet_within(const ParamRep& P, const ParamRep& Q, double eps) {
  const std::size_t k = P.size() - 1;
  const std::size_t l = Q.size() - 1;
  if (max_norm(P.front(), Q.front()) > eps || max_norm(P.back(), Q.back()) > eps) return false;
  // left[i][j]: reachable part of the edge {P vertex i} x Q segment j.
  // bottom[i][j]: reachable part of P segment i x {Q vertex j}.
  std::vector<Interval> left((k + 1) * l);
  std::vector<Interval> bottom(k * (l + 1));
  auto L = [&](std::size_t i, std::size_t j) -> Interval& { return left[i * l + j]; };
  auto B = [&](std::size_t i, std::size_t j) -> Interval& { return bottom[i * (l + 1) + j]; };

  bool open = true;
  for (std::size_t j = 0; j < l; ++j) {
    const auto f = free_interval(P[0], Q[j], Q[j + 1], eps);
    L(0, j) = open && !f.empty() && f.lo <= 0.0 ? f : Interval{};
    open = !L(0, j).empty() && L(0, j).hi >= 1.0;
  }
  open = true;
  for (std::size_t i = 0; i < k; ++i) {
    const auto f = free_interval(Q[0], P[i], P[i + 1], eps);
    B(i, 0) = open && !f.empty() && f.lo <= 0.0 ? f : Interval{};
    open = !B(i, 0).empty() && B(i, 0).hi >= 1.0;
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      const Interval& lr = L(i, j);
      const Interval& br = B(i, j);
      const auto right = free_interval(P[i + 1], Q[j], Q[j + 1], eps);
      const auto top = free_interval(Q[j + 1], P[i], P[i + 1], eps);
      Interval r{};
      Interval t{};
      if (!br.empty()) {
        r = right;
      } else if (!lr.empty()) {
        r = {std::max(right.lo, lr.lo), right.hi};
      }
      if (!lr.empty()) {
        t = top;
      } else if (!br.empty()) {
        t = {std::max(top.lo, br.lo), top.hi};
      }
      L(i + 1, j) = r;
      B(i, j + 1) = t;
    }
  }
  const Interval& r = L(k, l - 1);
  const Interval& t = B(k - 1, l);
  return (!r.empty() && r.hi >= 1.0) || (!t.empty() && t.hi >= 1.0);
}

std::vector<double> piece_ends(const StepPath& p) {
  std::vector<double> e(p.times.begin() + 1, p.times.end());
  e.push_back(1.0);
  return e;
}

template <class Decide>
double bisect_distance(const StepPath& x, const StepPath& y, double tol, Decide&& decide, const char* name) {
  if (!(tol > 0.0)) throw DomainError(std::string(name) + ": tol must be positive");
  double hi = uniform_distance(x, y);
  double lo = 0.0;
  if (decide(0.0)) return 0.0;
  int widen = 0;
  while (!decide(hi)) {
    lo = hi;
    hi = hi * 2.0 + tol;
    if (++widen > 60) throw NumericError(std::string(name) + ": decision procedure never accepts", hi, hi - lo);
  }
  int steps = 0;
  while (hi - lo > tol / 4.0) {
    const double mid = 0.5 * (lo + hi);
    (decide(mid) ? hi : lo) = mid;
    if (++steps > 200) throw NumericError(std::string(name) + ": bisection did not converge", hi, hi - lo);
  }
  return hi;
}

}  // namespace

bool m1_within(const StepPath& x, const StepPath& y, double eps) {
  return frechet_within(completed_graph(x), completed_graph(y), eps);
}

bool j1_within(const StepPath& x, const StepPath& y, double eps) {
  validate(x);
  validate(y);
  // Cells (i, j): x piece i (s-axis) times y piece j (t-axis); lambda maps t to s.
  const auto& s0 = x.times;
  const auto& t0 = y.times;
  const auto s1 = piece_ends(x);
  const auto t1 = piece_ends(y);
  const std::size_t P = s0.size();
  const std::size_t Q = t0.size();
  std::vector<Interval> bottom(P * Q);  // t-interval entering through s = s0[i]
  std::vector<Interval> left(P * Q);    // s-interval entering through t = t0[j]
  std::vector<char> corner(P * Q, 0);
  corner[0] = 1;
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < Q; ++j) {
      const std::size_t c = i * Q + j;
      if (std::abs(x.values[i] - y.values[j]) > eps) continue;
      const Interval& b = bottom[c];
      const Interval& l = left[c];
      const bool any = corner[c] || !b.empty() || !l.empty();
      if (!any) continue;
      if (i + 1 == P && j + 1 == Q) return true;
      const double tmin = (corner[c] || !l.empty()) ? t0[j] : b.lo;
      const double smin = (corner[c] || !b.empty()) ? s0[i] : l.lo;
      if (i + 1 < P) {
        const double s = s1[i];
        Interval top{std::max({tmin, t0[j], s - eps}), std::min(t1[j], s + eps)};
        if (!top.empty()) {
          Interval& dst = bottom[c + Q];
          dst = dst.empty() ? top : Interval{std::min(dst.lo, top.lo), std::max(dst.hi, top.hi)};
        }
      }
      if (j + 1 < Q) {
        const double t = t1[j];
        Interval right{std::max({smin, s0[i], t - eps}), std::min(s1[i], t + eps)};
        if (!right.empty()) {
          Interval& dst = left[c + 1];
          dst = dst.empty() ? right : Interval{std::min(dst.lo, right.lo), std::max(dst.hi, right.hi)};
        }
      }
      if (i + 1 < P && j + 1 < Q && std::abs(s1[i] - t1[j]) <= eps) corner[c + Q + 1] = 1;
    }
  }
  return false;
}

double m1_distance(const StepPath& x, const StepPath& y, double tol) {
  const auto gx = completed_graph(x);
  const auto gy = completed_graph(y);
  return bisect_distance(x, y, tol, [&](double e) { return frechet_within(gx, gy, e); }, "m1_distance");
}

double j1_distance(const StepPath& x, const StepPath& y, double tol) {
  return bisect_distance(x, y, tol, [&](double e) { return j1_within(x, y, e); }, "j1_distance");
}

double sup_functional(const StepPath& path) {
  validate(path);
  return *std::max_element(path.values.begin(), path.values.end());
}

FunctionalReport verify_functional(const FunctionalConfig& config) {
  validate(config.spec);
  const auto& tp = config.t_points;
  if (tp.size() != 3 || !(tp[0] >= 0.0 && tp[0] < tp[1] && tp[1] < tp[2] && tp[2] <= 1.0))
    throw ContractError("verify_functional: t_points must be 0 <= t0 < t1 < t2 <= 1");
  if (config.reps < 1000) throw ContractError("verify_functional: reps must be >= 1000");
  if (config.oracle_grid < 1) throw ContractError("verify_functional: oracle grid must be >= 1");
  if (config.n_grid.empty()) throw ContractError("verify_functional: empty n_grid");

  FunctionalReport report;
  report.limit = limit_mu_inf(config.spec);
  const double alpha = report.limit.alpha;

  // Fine-grid limit Levy path: i.i.d. increments of mu_inf^{*1/G}.
  auto oracle = [&](std::size_t grid, std::vector<double>& sups, std::vector<double>& ends) {
    const double g = static_cast<double>(grid);
    const StableSampler step(StableParams{alpha, report.limit.beta, report.limit.scale * std::pow(g, -1.0 / alpha),
                                          report.limit.location / g});
    const std::string tag = "oracle/G=" + std::to_string(grid);
    sups.assign(config.reps, 0.0);
    ends.assign(config.reps, 0.0);
    parallel_for(config.reps, config.workers, [&](std::size_t i) {
      auto stream = RngStream::derive(config.seed, tag, i);
      double s = 0.0;
      double best = 0.0;
      for (std::size_t k = 0; k < grid; ++k) {
        s += step(stream);
        best = std::max(best, s);
      }
      sups[i] = best;
      ends[i] = s;
    });
  };
  std::vector<double> oracle_sup;
  std::vector<double> oracle_end;
  oracle(config.oracle_grid, oracle_sup, oracle_end);
  {
    std::vector<double> fine_sup;
    std::vector<double> fine_end;
    oracle(2 * config.oracle_grid, fine_sup, fine_end);
    report.oracle_doubling_ks = ks_two_sample(oracle_sup, fine_sup).statistic;
  }

  double lag_moment = 0.0;
  for (std::size_t r = 1; r < config.spec.coeffs.size(); ++r)
    lag_moment += static_cast<double>(r) * truncated_levy_cov(normalized_pair_spectral(config.spec, r), 1.0);
  double max_product = 0.0;
  for (double l : config.lambda_grid)
    for (double t : config.theta_grid) max_product = std::max(max_product, std::abs(l * t));

  const StableSampler sampler(config.spec.innovation);
  const std::size_t q = config.spec.coeffs.size() - 1;
  const std::size_t nl = config.lambda_grid.size();
  const std::size_t nt = config.theta_grid.size();
  // features: e^{i l I1} (nl), Delta_t = e^{i t I2} - e^{i t I2'} (nt), e^{i l I1} Delta_t (nl nt); complex each
  const std::size_t features = 2 * (nl + nt + nl * nt);

  for (std::size_t n : config.n_grid) {
    FunctionalRow row;
    row.n = n;
    row.b_n = normalizing_constant(config.spec, n);
    const double b = row.b_n;
    const auto j0 = static_cast<std::size_t>(std::floor(static_cast<double>(n) * tp[0]));
    const auto j1 = static_cast<std::size_t>(std::floor(static_cast<double>(n) * tp[1]));
    const auto j2 = static_cast<std::size_t>(std::floor(static_cast<double>(n) * tp[2]));
    if (!(j0 < j1 && j1 < j2)) throw ContractError("verify_functional: n too small for the increment time points");
    std::vector<double> sups(config.reps);
    std::vector<double> ends(config.reps);
    std::vector<char> same(config.reps);
    std::vector<std::vector<double>> columns(features, std::vector<double>(config.reps));
    const std::string tag = path_tag(n);
    parallel_for(config.reps, config.workers, [&](std::size_t i) {
      thread_local std::vector<double> z;
      thread_local std::vector<double> x;
      auto stream = RngStream::derive(config.seed, tag, i);
      simulate_path_into(config.spec, sampler, n, stream, z, x);
      const auto path = build_partial_sum_path(x, b);
      sups[i] = sup_functional(path);
      ends[i] = path.values.back();
      same[i] = sups[i] == ends[i];

      double inc1 = 0.0;
      for (std::size_t j = j0; j < j1; ++j) inc1 += x[j];
      double inc2 = 0.0;
      for (std::size_t j = j1; j < j2; ++j) inc2 += x[j];
      // Refresh the innovations both increments see; X_j (0-based j) uses z[j .. j+q].
      double shift = 0.0;
      if (q > 0) {
        const std::size_t first = j1;
        const std::size_t last = j1 + q - 1;
        std::vector<double> fresh(q);
        for (double& v : fresh) v = sampler(stream);
        for (std::size_t j = j1; j < std::min(j2, j1 + q); ++j) {
          double changed = 0.0;
          for (std::size_t k = 0; k <= q; ++k) {
            const std::size_t m = j + q - k;
            if (m >= first && m <= last) changed += config.spec.coeffs[k] * (fresh[m - first] - z[m]);
          }
          shift += changed;
        }
      }
      const double i1 = inc1 / b;
      const double i2 = inc2 / b;
      const double i2c = (inc2 + shift) / b;
      std::size_t f = 0;
      std::vector<std::complex<double>> e1(nl);
      std::vector<std::complex<double>> d(nt);
      for (std::size_t a = 0; a < nl; ++a) e1[a] = std::polar(1.0, config.lambda_grid[a] * i1);
      for (std::size_t c = 0; c < nt; ++c)
        d[c] = std::polar(1.0, config.theta_grid[c] * i2) - std::polar(1.0, config.theta_grid[c] * i2c);
      auto put = [&](std::complex<double> v) {
        columns[f++][i] = v.real();
        columns[f++][i] = v.imag();
      };
      for (const auto& v : e1) put(v);
      for (const auto& v : d) put(v);
      for (std::size_t a = 0; a < nl; ++a)
        for (std::size_t c = 0; c < nt; ++c) put(e1[a] * d[c]);
    });

    row.sup_is_terminal = std::all_of(same.begin(), same.end(), [](char c) { return c != 0; });
    row.ks_sup_oracle = ks_two_sample(sups, oracle_sup).statistic;
    row.ks_terminal_oracle = ks_two_sample(ends, oracle_end).statistic;
    row.ks_sup_limit = ks_against(sups, report.limit, config.workers).statistic;
    row.ks_terminal_limit = ks_against(ends, report.limit, config.workers).statistic;

    for (std::size_t a = 0; a < nl; ++a) {
      for (std::size_t c = 0; c < nt; ++c) {
        const std::size_t pe = 2 * a;
        const std::size_t pd = 2 * (nl + c);
        const std::size_t pj = 2 * (nl + nt + a * nt + c);
        const auto e = jackknife_means(columns, [=](std::span<const double> m) {
          const std::complex<double> joint(m[pj], m[pj + 1]);
          const std::complex<double> e1(m[pe], m[pe + 1]);
          const std::complex<double> d(m[pd], m[pd + 1]);
          return std::abs(joint - e1 * d);
        });
        if (e.estimate > row.increment_gap) {
          row.increment_gap = e.estimate;
          row.increment_gap_se = e.se;
        }
      }
    }
    row.majorant = max_product * lag_moment / static_cast<double>(n);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace stablelab
