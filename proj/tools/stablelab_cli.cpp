// stablelab command line: simulate, diagnose, verify, m1-dist.
// Exit codes: 0 success (a failed diagnosis is still a success), 1 usage or
// config error, 2 numeric failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stablelab/runner.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kNumeric = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace stablelab;
  CLI::App app{"Simulation and verification lab for stable limits of associated sequences"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out_dir = "out";
  bool reproducible = false;
  std::string which;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_flag("--reproducible", reproducible, "omit timestamps from SVGs and the manifest");
  };
  auto* simulate = app.add_subcommand("simulate", "write sample paths");
  auto* diagnose = app.add_subcommand("diagnose", "truncated-covariance condition report");
  auto* verify = app.add_subcommand("verify", "run a convergence check");
  auto* m1 = app.add_subcommand("m1-dist", "M1, J1 and uniform distance of two step paths");
  for (auto* sub : {simulate, diagnose, verify, m1}) common(sub);
  verify->add_option("which", which, "main | alpha1 | tangent | functional | newman")
      ->required()
      ->check(CLI::IsMember({"main", "alpha1", "tangent", "functional", "newman"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  RunOptions options;
  options.out_dir = out_dir;
  options.seed = seed;
  options.workers = workers;
  options.reproducible = reproducible;

  try {
    const RunConfig config = load_config(config_path);
    RunManifest manifest;
    if (*simulate) manifest = run_simulate(config, options);
    if (*diagnose) manifest = run_diagnose(config, options);
    if (*verify) manifest = run_verify(config, verify_kind_from_string(which), options);
    if (*m1) manifest = run_m1_dist(config, options);
    for (const auto& e : manifest.outputs)
      for (const auto& f : e.files) std::cout << out_dir << "/" << f << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (best estimate " << e.best_estimate() << ", tolerance "
              << e.achieved_tolerance() << ")\n";
    return kNumeric;
  } catch (const GridError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const BranchError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
