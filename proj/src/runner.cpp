#include "stablelab/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "stablelab/diagnostics.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/mpath.hpp"
#include "stablelab/parallel.hpp"
#include "stablelab/process.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

namespace fs = std::filesystem;

VerifyKind verify_kind_from_string(const std::string& name) {
  if (name == "main") return VerifyKind::main;
  if (name == "alpha1") return VerifyKind::alpha1;
  if (name == "tangent") return VerifyKind::tangent;
  if (name == "functional") return VerifyKind::functional;
  if (name == "newman") return VerifyKind::newman;
  throw ContractError("unknown verify kind '" + name + "'");
}

std::string to_string(VerifyKind kind) {
  switch (kind) {
    case VerifyKind::main: return "main";
    case VerifyKind::alpha1: return "alpha1";
    case VerifyKind::tangent: return "tangent";
    case VerifyKind::functional: return "functional";
    case VerifyKind::newman: return "newman";
  }
  return "?";
}

namespace {

std::string coeff_text(const std::vector<double>& c) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) s += (k ? " " : "") + fmt(c[k]);
  return s;
}

std::string law_text(const StableParams& p) {
  return "alpha=" + fmt(p.alpha) + " beta=" + fmt(p.beta) + " scale=" + fmt(p.scale) + " location=" + fmt(p.location);
}

// Writes files and collects the manifest; one per run.
class Session {
 public:
  Session(const RunConfig& config, const RunOptions& options, std::string experiment)
      : config_(config), options_(options), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(options.out_dir);
    manifest_.config_hash = hex_hash(config.hash);
    manifest_.seed = seed();
    manifest_.tool_version = kToolVersion;
    if (!options.reproducible) manifest_.started_at = utc_timestamp();
    manifest_.outputs.push_back({std::move(experiment), {}});
  }

  std::uint64_t seed() const { return options_.seed.value_or(config_.seed); }
  unsigned workers() const { return options_.workers; }

  CsvTable table(const std::string& what) const {
    CsvTable t;
    t.add_meta("tool", std::string("stablelab ") + kToolVersion);
    t.add_meta("experiment", manifest_.outputs.back().experiment + "/" + what);
    t.add_meta("config_hash", manifest_.config_hash);
    t.add_meta("seed", std::to_string(seed()));
    if (config_.process) {
      t.add_meta("coeffs", coeff_text(config_.process->coeffs));
      t.add_meta("innovation", law_text(config_.process->innovation));
    }
    return t;
  }

  PlotOptions plot(std::string title, std::string x, std::string y) const {
    PlotOptions o;
    o.title = std::move(title);
    o.x_label = std::move(x);
    o.y_label = std::move(y);
    if (!options_.reproducible) o.timestamp = utc_timestamp();
    return o;
  }

  void write(const std::string& name, const std::string& text) {
    write_text((fs::path(options_.out_dir) / name).string(), text);
    manifest_.outputs.back().files.push_back(name);
  }

  RunManifest finish() {
    manifest_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text((fs::path(options_.out_dir) / "manifest.json").string(), manifest_.to_json());
    return manifest_;
  }

 private:
  const RunConfig& config_;
  const RunOptions& options_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

RunManifest verify_main_run(const RunConfig& cfg, Session& s) {
  const auto& v = cfg.verify;
  ExperimentConfig ec;
  ec.spec = cfg.require_process();
  ec.n_grid = v.n_grid;
  ec.reps = v.reps;
  ec.a = v.a;
  if (!v.lambda_grid.empty()) ec.lambda_grid = v.lambda_grid;
  ec.seed = s.seed();
  ec.workers = s.workers();
  const auto rep = verify_main(ec);
  auto t = s.table("main");
  t.add_meta("limit", law_text(rep.limit));
  t.columns = {"n", "b_n", "ks", "ks_p", "ecf_gap", "fit_alpha", "fit_beta", "fit_scale", "fit_location"};
  Series ks{"KS", {}, {}};
  Series gap{"ECF gap", {}, {}};
  for (const auto& r : rep.rows) {
    t.rows.push_back({std::to_string(r.n), fmt(r.b_n), fmt(r.ks), fmt(r.ks_p), fmt(r.ecf_gap), fmt(r.fitted.alpha),
                      fmt(r.fitted.beta), fmt(r.fitted.scale), fmt(r.fitted.location)});
    ks.x.push_back(static_cast<double>(r.n));
    ks.y.push_back(r.ks);
    gap.x.push_back(static_cast<double>(r.n));
    gap.y.push_back(r.ecf_gap);
  }
  s.write("main.csv", t.render());
  auto po = s.plot("S_n / B_n against the limit law", "n", "distance");
  po.log_x = true;
  s.write("main.svg", svg_plot({ks, gap}, po));

  // ECDF at the largest n, same replicate streams as the table
  const auto& last = rep.rows.back();
  const auto sums = normalized_sums(ec.spec, last.n, last.b_n, ec.reps, ec.seed, ec.workers);
  Series model{"limit cdf", {}, {}};
  const double lo = quantile(sums, 0.01);
  const double hi = quantile(sums, 0.99);
  for (int k = 0; k <= 100; ++k) {
    const double x = lo + (hi - lo) * k / 100.0;
    model.x.push_back(x);
    model.y.push_back(cdf_stable(rep.limit, x).value);
  }
  std::vector<double> clipped;
  for (double x : sums)
    if (x >= lo && x <= hi) clipped.push_back(x);
  auto eo = s.plot("ECDF of S_n / B_n, n = " + std::to_string(last.n), "x", "");
  s.write("main_ecdf.svg", svg_ecdf(clipped, "empirical (central 98%)", {model}, eo));

  if (v.split) {
    const auto rows = truncation_split_check(ec);
    auto st = s.table("split");
    st.add_meta("a", fmt(split_truncation(ec)));
    st.columns = {"n",           "b_n",          "p_nonzero_v", "se", "union_bound", "independent_exact",
                  "max_identity_error", "within_bound"};
    for (const auto& r : rows)
      st.rows.push_back({std::to_string(r.n), fmt(r.b_n), fmt(r.p_nonzero_v), fmt(r.se), fmt(r.union_bound),
                         fmt(r.independent_exact), fmt(r.max_identity_error), r.within_bound ? "1" : "0"});
    s.write("split.csv", st.render());
  }
  return s.finish();
}

RunManifest verify_alpha1_run(const RunConfig& cfg, Session& s) {
  const auto& v = cfg.verify;
  ExperimentConfig ec;
  ec.spec = cfg.require_process();
  ec.n_grid = v.n_grid;
  ec.reps = v.reps;
  if (!v.lambda_grid.empty()) ec.lambda_grid = v.lambda_grid;
  ec.seed = s.seed();
  ec.workers = s.workers();
  const auto rows = verify_alpha1_identity(ec);
  auto t = s.table("alpha1");
  t.columns = {"n", "ks", "ks_p", "ecf_gap"};
  Series p{"KS p-value", {}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n), fmt(r.ks), fmt(r.ks_p), fmt(r.ecf_gap)});
    p.x.push_back(static_cast<double>(r.n));
    p.y.push_back(r.ks_p);
  }
  s.write("alpha1.csv", t.render());
  auto po = s.plot("S_n / n against X_1 (two-sample)", "n", "p-value");
  po.log_x = true;
  s.write("alpha1.svg", svg_plot({p}, po));
  return s.finish();
}

RunManifest verify_tangent_run(const RunConfig& cfg, Session& s) {
  const auto& v = cfg.verify;
  const auto rep = verify_tangent_convergence(cfg.require_process(), v.block_grid,
                                              v.lambda_grid.empty() ? default_lambda_grid() : v.lambda_grid);
  auto t = s.table("tangent");
  t.add_meta("limit", law_text(rep.limit));
  t.add_meta("monotone", rep.monotone ? "1" : "0");
  t.columns = {"block", "gap"};
  Series g{"sup CF gap", {}, {}};
  for (const auto& r : rep.rows) {
    t.rows.push_back({std::to_string(r.block), fmt(r.gap)});
    g.x.push_back(static_cast<double>(r.block));
    g.y.push_back(r.gap);
  }
  s.write("tangent.csv", t.render());
  auto po = s.plot("Convolution root of S_N against the limit", "N", "gap");
  po.log_x = po.log_y = true;
  s.write("tangent.svg", svg_plot({g}, po));
  return s.finish();
}

RunManifest verify_functional_run(const RunConfig& cfg, Session& s) {
  const auto& v = cfg.verify;
  FunctionalConfig fc;
  fc.spec = cfg.require_process();
  fc.n_grid = v.n_grid;
  fc.reps = v.functional_reps;
  fc.t_points = v.t_points;
  fc.lambda_grid = v.functional_lambda_grid;
  fc.theta_grid = v.theta_grid;
  fc.oracle_grid = v.oracle_grid;
  fc.seed = s.seed();
  fc.workers = s.workers();
  const auto rep = verify_functional(fc);
  auto t = s.table("functional");
  t.add_meta("limit", law_text(rep.limit));
  t.add_meta("oracle_doubling_ks", fmt(rep.oracle_doubling_ks));
  t.columns = {"n",
               "b_n",
               "ks_sup_oracle",
               "ks_terminal_oracle",
               "ks_sup_limit",
               "ks_terminal_limit",
               "sup_is_terminal",
               "increment_gap",
               "increment_gap_se",
               "majorant"};
  Series gap{"increment gap", {}, {}};
  Series maj{"majorant", {}, {}};
  for (const auto& r : rep.rows) {
    t.rows.push_back({std::to_string(r.n), fmt(r.b_n), fmt(r.ks_sup_oracle), fmt(r.ks_terminal_oracle),
                      fmt(r.ks_sup_limit), fmt(r.ks_terminal_limit), r.sup_is_terminal ? "1" : "0",
                      fmt(r.increment_gap), fmt(r.increment_gap_se), fmt(r.majorant)});
    gap.x.push_back(static_cast<double>(r.n));
    gap.y.push_back(r.increment_gap);
    maj.x.push_back(static_cast<double>(r.n));
    maj.y.push_back(r.majorant);
  }
  s.write("functional.csv", t.render());
  auto po = s.plot("Increment factorization gap", "n", "gap");
  po.log_x = po.log_y = true;
  s.write("functional.svg", svg_plot({gap, maj}, po));
  return s.finish();
}

RunManifest verify_newman_run(const RunConfig& cfg, Session& s) {
  const auto& nm = cfg.verify.newman;
  std::vector<NewmanConfig> battery;
  if (nm.battery) {
    battery = default_newman_battery(nm.reps, s.seed(), s.workers());
  } else {
    NewmanConfig c;
    c.spec = cfg.require_process();
    c.m = nm.m;
    c.block = nm.block;
    c.a = nm.a;
    c.lambda = nm.lambda;
    c.reps = nm.reps;
    c.seed = s.seed();
    c.workers = s.workers();
    c.label = "config";
    battery.push_back(c);
  }
  auto t = s.table("newman");
  t.columns = {"label", "m",      "block",    "a",        "lambda", "lhs", "lhs_se",
               "rhs",   "rhs_se", "slack",    "slack_se", "majorant", "holds"};
  Series lhs{"LHS", {}, {}};
  Series rhs{"RHS", {}, {}};
  double k = 0;
  for (const auto& c : battery) {
    const auto r = newman_gap_check(c);
    t.rows.push_back({c.label, std::to_string(c.m), std::to_string(c.block), fmt(c.a), fmt(c.lambda),
                      fmt(r.lhs.estimate), fmt(r.lhs.se), fmt(r.rhs.estimate), fmt(r.rhs.se), fmt(r.slack.estimate),
                      fmt(r.slack.se), fmt(r.majorant), r.holds ? "1" : "0"});
    ++k;
    lhs.x.push_back(k);
    lhs.y.push_back(r.lhs.estimate);
    rhs.x.push_back(k);
    rhs.y.push_back(r.rhs.estimate);
  }
  s.write("newman.csv", t.render());
  s.write("newman.svg", svg_plot({lhs, rhs}, s.plot("Newman inequality per configuration", "configuration", "")));
  return s.finish();
}

}  // namespace

RunManifest run_simulate(const RunConfig& cfg, const RunOptions& options) {
  Session s(cfg, options, "simulate");
  const auto& spec = cfg.require_process();
  auto t = s.table("samples");
  t.columns = {"path", "j", "x"};
  std::vector<std::vector<double>> paths(cfg.simulate.paths);
  parallel_for(cfg.simulate.paths, s.workers(), [&](std::size_t p) {
    auto stream = RngStream::derive(s.seed(), "simulate", p);
    paths[p] = simulate_path(spec, cfg.simulate.n, stream);
  });
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t j = 0; j < paths[p].size(); ++j)
      t.rows.push_back({std::to_string(p), std::to_string(j + 1), fmt(paths[p][j])});
  s.write("samples.csv", t.render());
  Series first{"path 0", {}, {}};
  for (std::size_t j = 0; j < paths[0].size(); ++j) {
    first.x.push_back(static_cast<double>(j + 1));
    first.y.push_back(paths[0][j]);
  }
  s.write("samples.svg", svg_plot({first}, s.plot("Simulated path", "j", "X_j")));
  return s.finish();
}

RunManifest run_diagnose(const RunConfig& cfg, const RunOptions& options) {
  Session s(cfg, options, "diagnose");
  const auto& spec = cfg.require_process();
  const auto& d = cfg.diagnose;
  McOptions mc;
  mc.reps = d.reps;
  mc.seed = s.seed();
  mc.workers = s.workers();
  ConditionOptions co;
  co.a_values = d.a_values;
  co.family = cfg.family;
  co.divergence_threshold = d.divergence_threshold;
  co.relative_tolerance = d.relative_tolerance;
  const auto rep = condition_part_report(spec, d.n_grid, mc, co);

  auto t = s.table("condition");
  t.add_meta("verdict", rep.verdict ? "pass" : "fail");
  t.add_meta("reason", rep.reason);
  t.add_meta("rhs_finite", rep.rhs_finite ? "1" : "0");
  t.add_meta("lag_tail_fraction", fmt(rep.lag_tail_fraction));
  t.columns = {"a", "n", "b_n", "lhs", "lhs_se", "rhs_limit"};
  for (std::size_t k = 0; k < rep.a_values.size(); ++k)
    for (std::size_t i = 0; i < rep.n_grid.size(); ++i)
      t.rows.push_back({fmt(rep.a_values[k]), std::to_string(rep.n_grid[i]), fmt(rep.b_n[i]),
                        fmt(rep.lhs[i][k].estimate), fmt(rep.lhs[i][k].se), fmt(rep.rhs[k])});
  s.write("condition.csv", t.render());

  auto lt = s.table("condition_lags");
  lt.columns = {"lag", "rhs_at_a1"};
  for (std::size_t k = 0; k < rep.lags.size(); ++k)
    lt.rows.push_back({std::to_string(rep.lags[k]), fmt(rep.rhs_per_lag[k])});
  s.write("condition_lags.csv", lt.render());

  auto summary = s.table("verdict");
  summary.columns = {"verdict", "rhs_finite", "lag_tail_fraction", "reason"};
  std::string reason = rep.reason;
  for (char& c : reason)
    if (c == ',' || c == '\n') c = ';';
  summary.rows.push_back({rep.verdict ? "pass" : "fail", rep.rhs_finite ? "1" : "0", fmt(rep.lag_tail_fraction),
                          reason});
  s.write("verdict.csv", summary.render());

  TruncCovCurve curve;
  if (d.curve_reps > 0) {
    McOptions cm = mc;
    cm.reps = d.curve_reps;
    curve = trunc_cov_curve_mc(spec, d.curve_a_grid, cm);
  } else {
    curve = trunc_cov_curve_exact(spec, d.curve_a_grid);
  }
  auto ct = s.table("curve");
  ct.add_meta("source", d.curve_reps > 0 ? "monte carlo" : "closed form");
  ct.columns = {"a", "sum_g", "se"};
  Series cs{"sum_j g_j(a)", curve.a_grid, curve.values};
  bool positive = !curve.values.empty();
  for (std::size_t k = 0; k < curve.a_grid.size(); ++k) {
    ct.rows.push_back({fmt(curve.a_grid[k]), fmt(curve.values[k]), fmt(curve.se[k])});
    positive = positive && curve.values[k] > 0;
  }
  if (positive && curve.a_grid.size() >= 5) {
    try {
      const auto rv = rv_exponent_check(curve, spec.innovation.alpha);
      ct.add_meta("loglog_slope", fmt(rv.slope));
      ct.add_meta("expected_slope", fmt(rv.expected));
    } catch (const DomainError&) {
      // grid spans less than two decades; no slope reported
    }
  }
  s.write("curve.csv", ct.render());
  auto po = s.plot("a -> sum of truncated covariances", "a", "sum_j g_j(a)");
  po.log_x = true;
  po.log_y = positive;
  s.write("curve.svg", svg_plot({cs}, po));
  return s.finish();
}

RunManifest run_verify(const RunConfig& cfg, VerifyKind kind, const RunOptions& options) {
  Session s(cfg, options, "verify/" + to_string(kind));
  switch (kind) {
    case VerifyKind::main: return verify_main_run(cfg, s);
    case VerifyKind::alpha1: return verify_alpha1_run(cfg, s);
    case VerifyKind::tangent: return verify_tangent_run(cfg, s);
    case VerifyKind::functional: return verify_functional_run(cfg, s);
    case VerifyKind::newman: return verify_newman_run(cfg, s);
  }
  throw ContractError("unknown verify kind");
}

RunManifest run_m1_dist(const RunConfig& cfg, const RunOptions& options) {
  if (!cfg.m1_dist) throw ConfigError("config /: missing required key 'm1_dist'", "/m1_dist", 0);
  Session s(cfg, options, "m1-dist");
  const auto& m = *cfg.m1_dist;
  auto t = s.table("m1_dist");
  t.add_meta("tol", fmt(m.tol));
  t.columns = {"m1", "j1", "uniform"};
  t.rows.push_back({fmt(m1_distance(m.x, m.y, m.tol)), fmt(j1_distance(m.x, m.y, m.tol)),
                    fmt(uniform_distance(m.x, m.y))});
  s.write("m1_dist.csv", t.render());
  auto px = [](const StepPath& p, const std::string& name) {
    Series se{name, {}, {}};
    for (const auto& [tt, v] : completed_graph(p)) {
      se.x.push_back(tt);
      se.y.push_back(v);
    }
    return se;
  };
  s.write("m1_dist.svg", svg_plot({px(m.x, "x"), px(m.y, "y")}, s.plot("Completed graphs", "t", "value")));
  return s.finish();
}

}  // namespace stablelab
