#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stablelab/config.hpp"
#include "stablelab/report.hpp"

namespace stablelab {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned workers = 1;
  bool reproducible = false;  // no timestamps in SVGs or the manifest
};

enum class VerifyKind { main, alpha1, tangent, functional, newman };
VerifyKind verify_kind_from_string(const std::string& name);
std::string to_string(VerifyKind kind);

/// Each runner writes its CSV/SVG files and manifest.json into out_dir and
/// returns the manifest.
RunManifest run_simulate(const RunConfig& config, const RunOptions& options);
RunManifest run_diagnose(const RunConfig& config, const RunOptions& options);
RunManifest run_verify(const RunConfig& config, VerifyKind kind, const RunOptions& options);
RunManifest run_m1_dist(const RunConfig& config, const RunOptions& options);

}  // namespace stablelab
