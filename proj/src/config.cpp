#include "stablelab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "stablelab/rng.hpp"

namespace stablelab {

using nlohmann::json;

namespace {

// Line of the first occurrence of "key" at or after the line of the parent.
std::size_t line_of(const std::string& text, const std::string& key, std::size_t from_line) {
  std::size_t line = 1;
  std::size_t pos = 0;
  while (line < from_line && pos < text.size()) {
    if (text[pos] == '\n') ++line;
    ++pos;
  }
  const auto hit = text.find('"' + key + '"', pos);
  if (hit == std::string::npos) return 0;
  return line + static_cast<std::size_t>(std::count(text.begin() + pos, text.begin() + hit, '\n'));
}

class Node {
 public:
  Node(const json& value, std::string pointer, const std::string& text, std::size_t line)
      : v_(value), ptr_(std::move(pointer)), text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::string where = ptr_.empty() ? "/" : ptr_;
    std::string full = "config " + where;
    if (line_ > 0) full += " (line " + std::to_string(line_) + ")";
    throw ConfigError(full + ": " + msg, where, line_);
  }

  void object(std::initializer_list<const char*> allowed) const {
    if (!v_.is_object()) fail("expected an object");
    for (const auto& item : v_.items()) {
      const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
      if (!ok) child_unchecked(item.key()).fail("unknown key '" + item.key() + "'");
    }
  }

  bool has(const char* key) const { return v_.contains(key); }

  Node child(const char* key) const {
    if (!v_.contains(key)) fail("missing required key '" + std::string(key) + "'");
    return child_unchecked(key);
  }

  double number() const {
    if (!v_.is_number()) fail("expected a number");
    return v_.get<double>();
  }

  std::size_t count() const {
    if (!v_.is_number_unsigned() && !(v_.is_number_integer() && v_.get<long long>() >= 0))
      fail("expected a nonnegative integer");
    return v_.get<std::size_t>();
  }

  std::uint64_t u64() const {
    if (!v_.is_number_unsigned() && !(v_.is_number_integer() && v_.get<long long>() >= 0))
      fail("expected a nonnegative integer");
    return v_.get<std::uint64_t>();
  }

  bool boolean() const {
    if (!v_.is_boolean()) fail("expected true or false");
    return v_.get<bool>();
  }

  std::string string() const {
    if (!v_.is_string()) fail("expected a string");
    return v_.get<std::string>();
  }

  std::vector<double> numbers() const {
    if (!v_.is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v_.size(); ++k) out.push_back(at(k).number());
    return out;
  }

  std::vector<std::size_t> counts() const {
    if (!v_.is_array()) fail("expected an array of nonnegative integers");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < v_.size(); ++k) out.push_back(at(k).count());
    return out;
  }

  template <class T, class Get>
  void opt(const char* key, T& dst, Get get) const {
    if (has(key)) dst = (child(key).*get)();
  }

 private:
  Node child_unchecked(const std::string& key) const {
    return Node(v_.at(key), ptr_ + "/" + key, text_, line_of(text_, key, line_ > 0 ? line_ : 1));
  }
  Node at(std::size_t k) const { return Node(v_.at(k), ptr_ + "/" + std::to_string(k), text_, line_); }

  const json& v_;
  std::string ptr_;
  const std::string& text_;
  std::size_t line_;
};

StepPath read_path(const Node& node) {
  node.object({"times", "values"});
  StepPath p{node.child("times").numbers(), node.child("values").numbers()};
  try {
    validate(p);
  } catch (const DomainError& e) {
    node.fail(e.what());
  }
  return p;
}

void read_process(const Node& node, RunConfig& cfg) {
  node.object({"coeffs", "family", "innovation"});
  const Node inn = node.child("innovation");
  inn.object({"alpha", "beta", "scale", "location"});
  StableParams z;
  z.alpha = inn.child("alpha").number();
  inn.opt("beta", z.beta, &Node::number);
  inn.opt("scale", z.scale, &Node::number);
  inn.opt("location", z.location, &Node::number);
  if (node.has("coeffs") == node.has("family")) node.fail("exactly one of 'coeffs' and 'family' is required");
  MAProcessSpec spec;
  spec.innovation = z;
  if (node.has("coeffs")) {
    spec.coeffs = node.child("coeffs").numbers();
  } else {
    const Node fam = node.child("family");
    fam.object({"kind", "parameter", "length"});
    CoefficientFamily f;
    try {
      f.kind = family_kind_from_string(fam.child("kind").string());
    } catch (const Error& e) {
      fam.child("kind").fail(e.what());
    }
    f.parameter = fam.child("parameter").number();
    fam.opt("length", f.length, &Node::count);
    try {
      spec.coeffs = family_coefficients(f);
    } catch (const Error& e) {
      fam.fail(e.what());
    }
    cfg.family = f;
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    node.fail(e.what());
  }
  cfg.process = spec;
}

}  // namespace

const MAProcessSpec& RunConfig::require_process() const {
  if (!process) throw ConfigError("config /: missing required key 'process'", "/process", 0);
  return *process;
}

std::string hex_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // position is a byte offset; turn it into a line number
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ConfigError("config: invalid JSON near line " + std::to_string(line) + ": " + e.what(), "", line);
  }
  RunConfig cfg;
  const Node root(doc, "", text, 0);
  root.object({"process", "seed", "simulate", "diagnose", "verify", "m1_dist"});
  if (root.has("process")) read_process(root.child("process"), cfg);
  root.opt("seed", cfg.seed, &Node::u64);

  if (root.has("simulate")) {
    const Node s = root.child("simulate");
    s.object({"n", "paths"});
    s.opt("n", cfg.simulate.n, &Node::count);
    s.opt("paths", cfg.simulate.paths, &Node::count);
    if (cfg.simulate.n == 0 || cfg.simulate.paths == 0) s.fail("n and paths must be positive");
  }
  if (root.has("diagnose")) {
    const Node d = root.child("diagnose");
    d.object({"n_grid", "reps", "a_values", "divergence_threshold", "relative_tolerance", "curve_a_grid",
              "curve_reps"});
    auto& o = cfg.diagnose;
    d.opt("n_grid", o.n_grid, &Node::counts);
    d.opt("reps", o.reps, &Node::count);
    d.opt("a_values", o.a_values, &Node::numbers);
    d.opt("divergence_threshold", o.divergence_threshold, &Node::number);
    d.opt("relative_tolerance", o.relative_tolerance, &Node::number);
    d.opt("curve_a_grid", o.curve_a_grid, &Node::numbers);
    d.opt("curve_reps", o.curve_reps, &Node::count);
  }
  if (root.has("verify")) {
    const Node v = root.child("verify");
    v.object({"n_grid", "reps", "lambda_grid", "split", "a", "block_grid", "functional_reps", "t_points",
              "theta_grid", "functional_lambda_grid", "oracle_grid", "newman"});
    auto& o = cfg.verify;
    v.opt("n_grid", o.n_grid, &Node::counts);
    v.opt("reps", o.reps, &Node::count);
    v.opt("lambda_grid", o.lambda_grid, &Node::numbers);
    v.opt("split", o.split, &Node::boolean);
    v.opt("a", o.a, &Node::number);
    v.opt("block_grid", o.block_grid, &Node::counts);
    v.opt("functional_reps", o.functional_reps, &Node::count);
    v.opt("t_points", o.t_points, &Node::numbers);
    v.opt("theta_grid", o.theta_grid, &Node::numbers);
    v.opt("functional_lambda_grid", o.functional_lambda_grid, &Node::numbers);
    v.opt("oracle_grid", o.oracle_grid, &Node::count);
    if (v.has("newman")) {
      const Node nm = v.child("newman");
      nm.object({"reps", "battery", "m", "block", "a", "lambda"});
      nm.opt("reps", o.newman.reps, &Node::count);
      nm.opt("battery", o.newman.battery, &Node::boolean);
      nm.opt("m", o.newman.m, &Node::count);
      nm.opt("block", o.newman.block, &Node::count);
      nm.opt("a", o.newman.a, &Node::number);
      nm.opt("lambda", o.newman.lambda, &Node::number);
    }
  }
  if (root.has("m1_dist")) {
    const Node m = root.child("m1_dist");
    m.object({"x", "y", "tol"});
    M1Section sec;
    sec.x = read_path(m.child("x"));
    sec.y = read_path(m.child("y"));
    m.opt("tol", sec.tol, &Node::number);
    if (!(sec.tol > 0.0)) m.child("tol").fail("tol must be positive");
    cfg.m1_dist = sec;
  }
  cfg.canonical = doc.dump();  // object keys come out sorted
  cfg.hash = fnv1a64(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'", "", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json parse_or_fail(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "", 0);
  }
}

}  // namespace

std::string to_json(const StableVectorModel& model) {
  nlohmann::ordered_json j;
  j["alpha"] = model.alpha;
  j["atoms"] = model.gamma.atoms;
  j["weights"] = model.gamma.weights;
  j["shift"] = model.gamma.shift;
  return j.dump();
}

StableVectorModel spectral_model_from_json(const std::string& text) {
  const json doc = parse_or_fail(text);
  const Node root(doc, "", text, 0);
  root.object({"alpha", "atoms", "weights", "shift"});
  StableVectorModel m;
  m.alpha = root.child("alpha").number();
  const Node atoms = root.child("atoms");
  if (!doc.at("atoms").is_array()) atoms.fail("expected an array of atoms");
  for (std::size_t k = 0; k < doc.at("atoms").size(); ++k)
    m.gamma.atoms.push_back(Node(doc.at("atoms").at(k), "/atoms/" + std::to_string(k), text, 0).numbers());
  m.gamma.weights = root.child("weights").numbers();
  m.gamma.shift = root.child("shift").numbers();
  try {
    validate(m);
  } catch (const DomainError& e) {
    root.fail(e.what());
  }
  return m;
}

std::string to_json(const MAProcessSpec& spec) {
  nlohmann::ordered_json j;
  j["coeffs"] = spec.coeffs;
  j["innovation"] = {{"alpha", spec.innovation.alpha},
                     {"beta", spec.innovation.beta},
                     {"scale", spec.innovation.scale},
                     {"location", spec.innovation.location}};
  return j.dump();
}

MAProcessSpec process_from_json(const std::string& text) {
  const json doc = parse_or_fail(text);
  RunConfig cfg;
  read_process(Node(doc, "", text, 0), cfg);
  return *cfg.process;
}

}  // namespace stablelab
