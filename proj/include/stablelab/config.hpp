#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablelab/errors.hpp"
#include "stablelab/mpath.hpp"
#include "stablelab/process.hpp"

namespace stablelab {

/// Malformed or schema-violating configuration. `where` is a JSON pointer
/// to the offending value (or "" for parse errors) and `line` its 1-based
/// line in the source text, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string where, std::size_t line)
      : Error(what), where_(std::move(where)), line_(line) {}
  const std::string& where() const noexcept { return where_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string where_;
  std::size_t line_;
};

struct SimulateSection {
  std::size_t n = 1000;
  std::size_t paths = 1;
};

struct DiagnoseSection {
  std::vector<std::size_t> n_grid{100, 1000, 10000};
  std::size_t reps = 100000;
  std::vector<double> a_values{0.5, 1.0, 2.0};
  double divergence_threshold = 0.05;
  double relative_tolerance = 0.10;
  /// Grid of the a -> sum_j g_j(a) curve; curve_reps = 0 uses the closed form.
  std::vector<double> curve_a_grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::size_t curve_reps = 0;
};

struct NewmanSection {
  std::size_t reps = 20000;
  bool battery = true;  // the built-in 20 configurations
  std::size_t m = 50;   // used when battery is false, with the process above
  std::size_t block = 20;
  double a = 1.0;
  double lambda = 1.0;
};

struct VerifySection {
  std::vector<std::size_t> n_grid{1000};
  std::size_t reps = 100000;
  std::vector<double> lambda_grid;  // empty: 0.1, 0.2, ..., 2.0
  bool split = false;               // also run the truncation split check
  double a = 0.0;
  std::vector<std::size_t> block_grid{10, 100, 1000, 10000};
  std::size_t functional_reps = 10000;
  std::vector<double> t_points{0.0, 0.5, 1.0};
  std::vector<double> theta_grid{0.5, 1.0, 2.0};
  std::vector<double> functional_lambda_grid{0.5, 1.0, 2.0};
  std::size_t oracle_grid = 10000;
  NewmanSection newman;
};

struct M1Section {
  StepPath x;
  StepPath y;
  double tol = 1e-3;
};

struct RunConfig {
  std::optional<MAProcessSpec> process;
  std::optional<CoefficientFamily> family;
  std::uint64_t seed = 0;
  SimulateSection simulate;
  DiagnoseSection diagnose;
  VerifySection verify;
  std::optional<M1Section> m1_dist;
  std::string canonical;  // key-sorted compact dump of the input document
  std::uint64_t hash = 0;

  /// The process, or ConfigError naming the missing key.
  const MAProcessSpec& require_process() const;
};

/// Parses and validates a JSON config; every object rejects unknown keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// 16 lowercase hex digits.
std::string hex_hash(std::uint64_t hash);

/// {"alpha", "atoms": [[...]], "weights": [...], "shift": [...]}
std::string to_json(const StableVectorModel& model);
StableVectorModel spectral_model_from_json(const std::string& text);

/// {"coeffs": [...], "innovation": {"alpha", "beta", "scale", "location"}}
std::string to_json(const MAProcessSpec& spec);
MAProcessSpec process_from_json(const std::string& text);

}  // namespace stablelab
