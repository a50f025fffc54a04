#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(STABLELAB_TEST_TMP) / "cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const auto p = kRoot / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + STABLELAB_CLI_PATH + "\" " + args + " > \"" +
                          (kRoot / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& name) { return (kRoot / name).string(); }

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

const char* kSmall = R"({
  "process": {"coeffs": [1, 0.5], "innovation": {"alpha": 1.5}},
  "seed": 11,
  "simulate": {"n": 25, "paths": 2},
  "verify": {"n_grid": [50, 100], "reps": 2000, "block_grid": [10, 100, 1000]}
})";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  const auto cfg = write_config("small.json", kSmall);
  CHECK(run("") == 1);
  CHECK(run("simulate") == 1);
  CHECK(run("verify bogus --config " + cfg.string()) == 1);
  CHECK(run("simulate --config " + out("does_not_exist.json")) == 1);
  CHECK(run("simulate --config " + cfg.string() + " --workers 0") == 1);
  CHECK(run("--help") == 0);

  const auto unknown = write_config("unknown.json", R"({"process": {"coeffs": [1], "innovation": {"alpha": 1.5}}, "sed": 1})");
  CHECK(run("simulate --config " + unknown.string() + " --out-dir " + out("u")) == 1);
  CHECK(slurp(kRoot / "last.log").find("sed") != std::string::npos);

  const auto alpha = write_config("alpha.json", R"({"process": {"coeffs": [1], "innovation": {"alpha": 1.5}},
    "verify": {"n_grid": [10], "reps": 1000}})");
  CHECK(run("verify alpha1 --config " + alpha.string() + " --out-dir " + out("a1")) == 1);
}

TEST_CASE("numeric failure exits with 2") {
  const auto cfg = write_config("tiny_tol.json", R"({"m1_dist": {
    "x": {"times": [0, 0.45, 0.5], "values": [0, 0.5, 1]},
    "y": {"times": [0, 0.5], "values": [0, 1]}, "tol": 1e-300}})");
  CHECK(run("m1-dist --config " + cfg.string() + " --out-dir " + out("m1bad")) == 2);
}

TEST_CASE("simulate writes headed CSVs and a manifest") {
  const auto cfg = write_config("iid.json", R"({"process": {"coeffs": [1], "innovation": {"alpha": 1.2}},
    "seed": 5, "simulate": {"n": 40, "paths": 3}})");
  REQUIRE(run("simulate --config " + cfg.string() + " --out-dir " + out("sim") + " --reproducible") == 0);
  const auto csv = slurp(kRoot / "sim" / "samples.csv");
  CHECK(data_rows(csv) == 120);
  CHECK(csv.find("# config_hash: ") != std::string::npos);
  CHECK(csv.find("# seed: 5\n") != std::string::npos);
  const auto manifest = slurp(kRoot / "sim" / "manifest.json");
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(manifest.find("samples.csv") != std::string::npos);
  CHECK(manifest.find("started_at") == std::string::npos);

  REQUIRE(run("simulate --config " + cfg.string() + " --out-dir " + out("sim9") + " --seed 9") == 0);
  const auto other = slurp(kRoot / "sim9" / "samples.csv");
  CHECK(other.find("# seed: 9\n") != std::string::npos);
  CHECK(other != csv);
}

TEST_CASE("reproducible runs are byte identical") {
  const auto cfg = write_config("small.json", kSmall);
  REQUIRE(run("verify main --config " + cfg.string() + " --out-dir " + out("r1") + " --reproducible --workers 1") == 0);
  REQUIRE(run("verify main --config " + cfg.string() + " --out-dir " + out("r2") + " --reproducible --workers 3") == 0);
  for (const char* f : {"main.csv", "main.svg", "main_ecdf.svg"}) {
    const auto a = slurp(kRoot / "r1" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(kRoot / "r2" / f));
  }
  const auto svg = slurp(kRoot / "r1" / "main.svg");
  CHECK(svg.find("generated") == std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find("<svg") != std::string::npos);

  REQUIRE(run("verify main --config " + cfg.string() + " --out-dir " + out("r3")) == 0);
  CHECK(slurp(kRoot / "r3" / "main.svg").find("generated") != std::string::npos);
  CHECK(slurp(kRoot / "r3" / "main.csv") == slurp(kRoot / "r1" / "main.csv"));
}

TEST_CASE("tangent output is deterministic") {
  const auto cfg = write_config("small.json", kSmall);
  REQUIRE(run("verify tangent --config " + cfg.string() + " --out-dir " + out("t1") + " --reproducible") == 0);
  REQUIRE(run("verify tangent --config " + cfg.string() + " --out-dir " + out("t2") + " --reproducible --seed 99") == 0);
  const auto a = slurp(kRoot / "t1" / "tangent.csv");
  const auto b = slurp(kRoot / "t2" / "tangent.csv");
  CHECK(data_rows(a) == 3);
  // only the seed line may differ
  auto strip = [](std::string s) { return s.substr(s.find("\n", s.find("# seed:"))); };
  CHECK(strip(a) == strip(b));
}

TEST_CASE("a failed diagnosis still exits with 0") {
  const auto cfg = write_config("divergent.json", R"({
    "process": {"family": {"kind": "power", "parameter": 0.55, "length": 30}, "innovation": {"alpha": 1.5}},
    "diagnose": {"n_grid": [100, 1000], "reps": 2000, "a_values": [1]}})");
  REQUIRE(run("diagnose --config " + cfg.string() + " --out-dir " + out("div") + " --reproducible") == 0);
  const auto verdict = slurp(kRoot / "div" / "verdict.csv");
  CHECK(verdict.find("\nfail,0,") != std::string::npos);
}

TEST_CASE("m1-dist on the canonical pair") {
  const auto cfg = write_config("pair.json", R"({"m1_dist": {
    "x": {"times": [0, 0.45, 0.5], "values": [0, 0.5, 1]},
    "y": {"times": [0, 0.5], "values": [0, 1]}}})");
  REQUIRE(run("m1-dist --config " + cfg.string() + " --out-dir " + out("pair") + " --reproducible") == 0);
  const auto csv = slurp(kRoot / "pair" / "m1_dist.csv");
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
  }
  CHECK(line == "m1,j1,uniform");
  std::getline(in, line);
  double m1 = 0, j1 = 0, u = 0;
  REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &m1, &j1, &u) == 3);
  CHECK(std::abs(m1 - 0.05) <= 1e-3);
  CHECK(j1 >= 0.5 - 1e-3);
  CHECK(u == 0.5);
}
