#include "stablelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stablelab/errors.hpp"

namespace stablelab {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw ContractError("csv: row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

}  // namespace

std::string svg_plot(const std::vector<Series>& series, const PlotOptions& o) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  auto tx = [&](double v) { return o.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return o.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!o.log_x || x > 0) && (!o.log_y || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, tx(s.x[k]));
      x1 = std::max(x1, tx(s.x[k]));
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!o.timestamp.empty()) s << "<!-- generated " << escape(o.timestamp) << " -->\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(o.title)
    << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double vx = o.log_x ? std::pow(10.0, fx) : fx;
    const double vy = o.log_y ? std::pow(10.0, fy) : fy;
    s << "<text x=\"" << fmt(px(vx)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt(vx)
      << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(vy) + 4) << "\" text-anchor=\"end\">" << fmt(vy)
      << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(o.x_label)
    << "</text>\n";
  s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << escape(o.y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& se = series[i];
    const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
    std::ostringstream pts;
    bool any = false;
    double last_y = 0;
    for (std::size_t k = 0; k < std::min(se.x.size(), se.y.size()); ++k) {
      if (!usable(se.x[k], se.y[k])) continue;
      if (o.steps && any) pts << fmt(px(se.x[k])) << "," << fmt(py(last_y)) << " ";
      pts << fmt(px(se.x[k])) << "," << fmt(py(se.y[k])) << " ";
      last_y = se.y[k];
      any = true;
    }
    if (any)
      s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
        << "\"/>\n";
    s << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 15 * i << "\" fill=\"" << color << "\">"
      << escape(se.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_ecdf(std::vector<double> samples, const std::string& sample_name, const std::vector<Series>& model,
                     PlotOptions options) {
  std::sort(samples.begin(), samples.end());
  // thin to at most 2000 steps so the file stays small
  const std::size_t n = samples.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 2000);
  Series e{sample_name, {}, {}};
  for (std::size_t k = 0; k < n; k += stride) {
    e.x.push_back(samples[k]);
    e.y.push_back(static_cast<double>(k + 1) / static_cast<double>(n));
  }
  if (n > 0 && e.x.back() != samples.back()) {
    e.x.push_back(samples.back());
    e.y.push_back(1.0);
  }
  std::vector<Series> all{e};
  all.insert(all.end(), model.begin(), model.end());
  options.steps = false;
  if (options.y_label.empty()) options.y_label = "P(X <= x)";
  return svg_plot(all, options);
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["tool_version"] = tool_version;
  auto& outs = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& e : outputs) outs.push_back({{"experiment", e.experiment}, {"files", e.files}});
  j["wall_clock_seconds"] = wall_clock_seconds;
  if (!started_at.empty()) j["started_at"] = started_at;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace stablelab
