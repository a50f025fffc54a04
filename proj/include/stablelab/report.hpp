#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stablelab {

/// Fixed-format number: shortest of %.12g, "nan", "inf", "-inf".
std::string fmt(double x);

/// A table written as CSV. Metadata lines go first as "# key: value".
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  std::string render() const;
};

void write_text(const std::string& path, const std::string& text);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool steps = false;       // draw as a right-continuous staircase (ECDF)
  std::string timestamp;    // empty: omitted
};

/// Self-contained SVG line chart; nonpositive values are dropped on log axes.
std::string svg_plot(const std::vector<Series>& series, const PlotOptions& options);

/// Empirical cdf of `samples` plus optional model cdf curves.
std::string svg_ecdf(std::vector<double> samples, const std::string& sample_name, const std::vector<Series>& model,
                     PlotOptions options);

struct ExperimentOutputs {
  std::string experiment;
  std::vector<std::string> files;
};

/// Summary of a CLI run, written as manifest.json in the output directory.
struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<ExperimentOutputs> outputs;
  double wall_clock_seconds = 0.0;
  std::string started_at;  // empty under --reproducible

  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace stablelab
