// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stablelab/diagnostics.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/mpath.hpp"
#include "stablelab/process.hpp"
#include "stablelab/rng.hpp"
#include "stablelab/spectral.hpp"
#include "stablelab/stable.hpp"

using namespace stablelab;
namespace fs = std::filesystem;

namespace {

const unsigned kWorkers = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

StableParams sym(double alpha) { return {alpha, 0.0, 1.0, 0.0}; }

ExperimentConfig experiment(MAProcessSpec spec, std::vector<std::size_t> n_grid, std::size_t reps,
                            std::uint64_t seed) {
  ExperimentConfig c;
  c.spec = std::move(spec);
  c.n_grid = std::move(n_grid);
  c.reps = reps;
  c.seed = seed;
  c.workers = kWorkers;
  return c;
}

McOptions mc(std::size_t reps, std::uint64_t seed) {
  McOptions o;
  o.reps = reps;
  o.seed = seed;
  o.workers = kWorkers;
  return o;
}

Outcome iid_baseline() {
  const auto r = verify_main(experiment({{1.0}, sym(1.5)}, {1000}, 100000, 101));
  const double ks = r.rows[0].ks;
  return {ks < 0.015, "KS " + num(ks) + " (< 0.015)"};
}

Outcome dependent_main() {
  const auto r = verify_main(experiment({{1.0, 0.5, 0.25}, sym(1.5)}, {10000}, 100000, 102));
  const auto& row = r.rows[0];
  const double da = std::abs(row.fitted.alpha - r.limit.alpha);
  const double ds = std::abs(row.fitted.scale / r.limit.scale - 1.0);
  return {da <= 0.05 && ds <= 0.03 && row.ks < 0.02, "fitted alpha " + num(row.fitted.alpha) + ", scale error " +
                                                       num(100.0 * ds) + "%, KS " + num(row.ks)};
}

Outcome alpha1_identity() {
  const auto rows = verify_alpha1_identity(experiment({{1.0, 0.5, 0.25}, sym(1.0)}, {10, 100}, 100000, 103));
  bool ok = true;
  std::string d;
  for (const auto& r : rows) {
    ok = ok && r.ks_p > 1e-3;
    d += "n=" + std::to_string(r.n) + " p=" + num(r.ks_p) + " ";
  }
  return {ok, d + "(p > 0.001)"};
}

Outcome tangent_battery() {
  const std::vector<std::vector<double>> coeffs{{1.0, 0.5, 0.25}, {1.0, 1.0, 1.0}, {1.0, 0.2, 0.8}, {0.5, 1.0, 0.5}};
  const std::vector<StableParams> laws{{0.7, 1.0, 1.0, 0.0}, sym(1.0), sym(1.5), {1.5, 0.5, 1.0, 0.0}, sym(1.9)};
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool monotone = true;
  for (const auto& c : coeffs)
    for (const auto& z : laws) {
      const auto r = verify_tangent_convergence({c, z}, {10, 100, 1000, 10000});
      worst = std::max(worst, r.rows.back().gap);
      monotone = monotone && r.monotone;
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-3 && monotone && secs < 10.0, std::to_string(coeffs.size() * laws.size()) +
                                                       " specs, worst gap at N=1e4 " + num(worst) +
                                                       (monotone ? ", monotone" : ", NOT monotone") + ", " +
                                                       num(secs) + " s"};
}

Outcome single_lag() {
  const MAProcessSpec ma2{{1.0, 0.5}, sym(1.5)};
  const auto t = single_lag_limit_check(ma2, 1, 1.0, {10000}, mc(100000, 105));
  const auto& row = t.rows[0];
  const double rel = std::abs(row.estimate / row.limit - 1.0);
  double scaling = 0.0;
  const auto nu = normalized_pair_spectral(ma2, 1);
  const double base = truncated_levy_cov(nu, 1.0);
  for (double a : {0.1, 0.5, 2.0, 10.0, 100.0})
    scaling = std::max(scaling, std::abs(truncated_levy_cov(nu, a) / (std::pow(a, 0.5) * base) - 1.0));
  return {rel <= 0.10 && scaling <= 1e-12,
          "relative error " + num(100.0 * rel) + "% (SE " + num(100.0 * row.se / row.limit) + "%), scaling error " +
              num(scaling)};
}

Outcome rv_slopes() {
  const std::vector<MAProcessSpec> battery{{{1.0, 0.5}, sym(1.5)},
                                           {{1.0, 0.5, 0.25}, sym(1.5)},
                                           {{1.0, 1.0}, sym(1.5)},
                                           {{1.0, 0.2, 0.8}, sym(1.5)},
                                           {{1.0, 1.0}, {1.5, 1.0, 1.0, 0.0}}};
  std::vector<double> grid;
  for (int i = 0; i <= 6; ++i) grid.push_back(std::pow(10.0, 1.0 + i / 3.0));
  bool ok = true;
  std::string d = "slopes";
  std::uint64_t seed = 106;
  for (const auto& spec : battery) {
    const auto check = rv_exponent_check(trunc_cov_curve_mc(spec, grid, mc(100000, seed++)), 1.5);
    ok = ok && std::abs(check.slope - 0.5) <= 0.1;
    d += " " + num(check.slope);
  }
  return {ok, d + " (target 0.5 +- 0.1)"};
}

Outcome newman() {
  int held = 0;
  std::string failed;
  const auto battery = default_newman_battery(20000, 107, kWorkers);
  for (const auto& c : battery) {
    const auto r = newman_gap_check(c);
    if (r.holds)
      ++held;
    else
      failed += " [" + c.label + "]";
  }
  return {held == static_cast<int>(battery.size()),
          std::to_string(held) + "/" + std::to_string(battery.size()) + " hold" + failed};
}

StepPath random_path(RngStream& rng, int jumps) {
  std::vector<double> t{0.0};
  for (int k = 0; k < jumps; ++k) t.push_back(0.05 + 0.9 * rng.uniform());
  std::sort(t.begin(), t.end());
  StepPath p;
  for (double u : t) {
    if (!p.times.empty() && u - p.times.back() < 1e-3) continue;
    p.times.push_back(u);
    p.values.push_back(2.0 * rng.uniform() - 1.0);
  }
  return p;
}

Outcome m1_j1() {
  const StepPath y{{0.0, 0.5}, {0.0, 1.0}};
  bool ok = true;
  std::string d;
  for (double delta : {0.1, 0.05, 0.01}) {
    const StepPath x{{0.0, 0.5 - delta, 0.5}, {0.0, 0.5, 1.0}};
    const double m1 = m1_distance(x, y);
    const double j1 = j1_distance(x, y);
    ok = ok && m1 <= delta + 1e-3 && j1 >= 0.5 - 1e-3;
    d += "delta=" + num(delta) + " m1=" + num(m1) + " j1=" + num(j1) + "; ";
  }
  RngStream rng(108);
  double asym = 0.0;
  double excess = -1e300;
  for (int k = 0; k < 100; ++k) {
    const auto a = random_path(rng, 1 + k % 4);
    const auto b = random_path(rng, 1 + (k / 4) % 4);
    const auto c = random_path(rng, 2);
    const double ab = m1_distance(a, b);
    asym = std::max(asym, std::abs(ab - m1_distance(b, a)));
    excess = std::max(excess, ab - m1_distance(a, c) - m1_distance(c, b));
  }
  ok = ok && asym <= 2e-3 && excess <= 2e-3;
  return {ok, d + "100 triples: max asymmetry " + num(asym) + ", max triangle excess " + num(excess)};
}

Outcome functional() {
  FunctionalConfig pos;
  pos.spec = {{1.0, 1.0}, {0.7, 1.0, 1.0, 0.0}};
  pos.n_grid = {1000};
  pos.reps = 10000;
  pos.seed = 109;
  pos.workers = kWorkers;
  pos.oracle_grid = 1000;
  const auto p = verify_functional(pos);
  const bool identity = p.rows[0].sup_is_terminal && p.rows[0].ks_sup_limit == p.rows[0].ks_terminal_limit;

  FunctionalConfig iid;
  iid.spec = {{1.0}, sym(1.5)};
  iid.n_grid = {10000};
  iid.reps = 10000;
  iid.seed = 110;
  iid.workers = kWorkers;
  const auto s = verify_functional(iid);
  const double ks = s.rows[0].ks_sup_oracle;

  FunctionalConfig dep;
  dep.spec = {{1.0, 0.5, 0.25}, sym(1.5)};
  dep.n_grid = {100, 1000, 10000};
  dep.reps = 10000;
  dep.seed = 111;
  dep.workers = kWorkers;
  dep.oracle_grid = 1000;  // only the increment gaps are used here
  const auto g = verify_functional(dep);
  bool decreasing = true;
  std::string gaps;
  for (std::size_t k = 0; k < g.rows.size(); ++k) {
    if (k > 0 && !(g.rows[k].increment_gap < g.rows[k - 1].increment_gap)) decreasing = false;
    gaps += " " + num(g.rows[k].increment_gap);
  }
  return {identity && ks < 0.03 && decreasing,
          std::string("alpha=0.7 identity ") + (identity ? "exact" : "BROKEN") + "; sup KS vs oracle " + num(ks) +
              " (oracle doubling " + num(s.oracle_doubling_ks) + "); increment gaps" + gaps};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + STABLELAB_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> csv_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::path(STABLELAB_TEST_TMP) / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto main_cfg = root / "main.json";
  std::ofstream(main_cfg) << R"({
  "process": {"coeffs": [1, 0.5, 0.25], "innovation": {"alpha": 1.5}},
  "seed": 2024,
  "simulate": {"n": 200, "paths": 3},
  "diagnose": {"n_grid": [100, 1000], "reps": 5000, "curve_reps": 5000},
  "verify": {"n_grid": [100, 1000], "reps": 5000, "split": true, "block_grid": [10, 100, 1000],
             "functional_reps": 2000, "oracle_grid": 500,
             "newman": {"battery": false, "reps": 5000}},
  "m1_dist": {"x": {"times": [0, 0.45, 0.5], "values": [0, 0.5, 1]}, "y": {"times": [0, 0.5], "values": [0, 1]}}
})";
  const auto cauchy_cfg = root / "cauchy.json";
  std::ofstream(cauchy_cfg) << R"({
  "process": {"coeffs": [1, 0.5], "innovation": {"alpha": 1.0}},
  "seed": 7,
  "verify": {"n_grid": [10, 100], "reps": 5000}
})";
  const std::vector<std::pair<std::string, fs::path>> jobs{
      {"simulate", main_cfg},          {"diagnose", main_cfg},       {"verify main", main_cfg},
      {"verify tangent", main_cfg},    {"verify functional", main_cfg}, {"verify newman", main_cfg},
      {"m1-dist", main_cfg},           {"verify alpha1", cauchy_cfg}};
  for (unsigned workers : {1u, 8u}) {
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const auto dir = root / ("w" + std::to_string(workers)) / std::to_string(k);
      const int code = run_cli(jobs[k].first + " --config \"" + jobs[k].second.string() + "\" --out-dir \"" +
                                   dir.string() + "\" --workers " + std::to_string(workers),
                               root / "cli.log");
      if (code != 0) return {false, "'" + jobs[k].first + "' exited with " + std::to_string(code)};
    }
  }
  const auto a = csv_files(root / "w1");
  const auto b = csv_files(root / "w8");
  std::size_t same = 0;
  std::string diff;
  for (const auto& [name, body] : a) {
    const auto it = b.find(name);
    if (it != b.end() && it->second == body)
      ++same;
    else
      diff += " " + name;
  }
  const bool ok = !a.empty() && a.size() == b.size() && same == a.size();
  return {ok, std::to_string(same) + "/" + std::to_string(a.size()) + " CSVs identical" +
                  (diff.empty() ? "" : ", differ:" + diff)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"i.i.d. exact-law baseline", iid_baseline},
      {"dependent main convergence", dependent_main},
      {"alpha = 1 identity in law", alpha1_identity},
      {"tangent convergence", tangent_battery},
      {"single-lag truncated covariance", single_lag},
      {"regular-variation exponent", rv_slopes},
      {"Newman inequality battery", newman},
      {"M1/J1 canonical pair and axioms", m1_j1},
      {"functional convergence", functional},
      {"determinism across worker counts", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %zu %s: %s | %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
