#include "commands.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lingrowth");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = lingrowth::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lingrowth_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

} // namespace

TEST_CASE("density: finite integral for mu = 3") {
  const fs::path dir = fresh_dir("density");
  const Run r = run({"--out", dir.string(), "density", "--kind", "mu", "--mu", "3"});
  CHECK(r.code == lingrowth::cli::kOk);
  CHECK(r.out.find("FiniteIntegral") != std::string::npos);
  const json j = read_json(dir / "density.json");
  CHECK(j["growth"] == "FiniteIntegral");
  CHECK(fs::exists(dir / "config.json"));
}

TEST_CASE("density: infinite integral reports the inverse at one half") {
  const fs::path dir = fresh_dir("density2");
  const Run r = run({"--out", dir.string(), "density", "--kind", "mu", "--mu", "2"});
  CHECK(r.code == 0);
  CHECK(read_json(dir / "density.json")["inverse_gprime_half"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("density: mu <= 1 is a config error") {
  const fs::path dir = fresh_dir("density3");
  const Run r = run({"--out", dir.string(), "density", "--kind", "mu", "--mu", "0.5"});
  CHECK(r.code == lingrowth::cli::kConfigError);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("catenoid: area profile") {
  const fs::path dir = fresh_dir("catenoid");
  const Run r = run({"--out", dir.string(), "catenoid", "--density", "area", "--alpha", "1", "--rho-min", "2",
                     "--rho-max", "3", "--samples", "3"});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "profile.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "rho,value,slope");
  std::getline(csv, line);
  CHECK(line.rfind("2,1.31695789692,", 0) == 0);
}

TEST_CASE("catenoid: radius inside the neck") {
  const fs::path dir = fresh_dir("catenoid2");
  const Run r = run({"--out", dir.string(), "catenoid", "--density", "area", "--alpha", "1", "--rho-min", "0.5"});
  CHECK(r.code == lingrowth::cli::kDomainViolation);
  CHECK(r.err.find("neck radius 1") != std::string::npos);
}

TEST_CASE("catenoid: unit anchor blow-up") {
  const fs::path dir = fresh_dir("catenoid3");
  const Run r = run({"--out", dir.string(), "catenoid", "--density", "mu", "--mu", "2", "--alpha", "0.25", "--sign",
                     "minus", "--convention", "unit", "--rho-min", "0.26", "--rho-max", "1"});
  CHECK(r.code == 0);
  const json j = read_json(dir / "catenoid.json");
  CHECK(j["neck_value"] == "inf");
}

TEST_CASE("solve: affine data") {
  const fs::path dir = fresh_dir("solve");
  const Run r = run({"--out", dir.string(), "solve", "--density", "area", "--boundary", "affine"});
  CHECK(r.code == 0);
  const json j = read_json(dir / "diagnostics.json");
  CHECK(j["converged"] == true);
  CHECK(j["max_error_vs_exact"].get<double>() <= 1e-9);
  CHECK(fs::exists(dir / "solution.csv"));
}

TEST_CASE("solve: iteration cap is non-convergence") {
  const fs::path dir = fresh_dir("solve2");
  const Run r = run({"--out", dir.string(), "solve", "--density", "area", "--boundary", "catenoid", "--r-in", "1.5",
                     "--r-out", "3", "--max-iter", "1"});
  CHECK(r.code == lingrowth::cli::kNonConvergence);
}

TEST_CASE("experiment: config echo reproduces the report") {
  const fs::path dir = fresh_dir("experiment");
  const fs::path cfg = dir / "input.json";
  std::ofstream(cfg) << R"({"density": {"kind": "area"}, "seed": 5,
    "experiment": {"kind": "comparison", "trials": 3, "n_r": 6, "n_theta": 18}})";
  const Run first = run({"--config", cfg.string(), "--out", (dir / "a").string(), "experiment"});
  CHECK(first.code == 0);
  CHECK(first.out.find("PASS") != std::string::npos);
  const Run second =
      run({"--config", (dir / "a" / "config.json").string(), "--out", (dir / "b").string(), "--quiet", "experiment"});
  CHECK(second.code == 0);
  CHECK(second.out.empty());
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(read_json(dir / "a" / "config.json")["seed"] == 5);
}

TEST_CASE("config errors") {
  const fs::path dir = fresh_dir("config");
  const fs::path cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"density": {"kind": "area"}, "colour": 1})";
  CHECK(run({"--config", cfg.string(), "--out", dir.string(), "density"}).code == lingrowth::cli::kConfigError);
  CHECK(run({"--config", (dir / "missing.json").string(), "density"}).code == lingrowth::cli::kConfigError);
  CHECK(run({"--out", dir.string(), "density", "--kind", "cubic"}).code == lingrowth::cli::kConfigError);
  CHECK(run({"--bogus"}).code == lingrowth::cli::kConfigError);
  CHECK(run({"--help"}).code == lingrowth::cli::kOk);
}

TEST_CASE("thread count from the environment") {
  const fs::path dir = fresh_dir("threads");
  setenv("LINGROWTH_THREADS", "zero", 1);
  CHECK(run({"--out", dir.string(), "density", "--kind", "area"}).code == lingrowth::cli::kConfigError);
  setenv("LINGROWTH_THREADS", "2", 1);
  CHECK(run({"--out", dir.string(), "density", "--kind", "area"}).code == lingrowth::cli::kOk);
  unsetenv("LINGROWTH_THREADS");
}
