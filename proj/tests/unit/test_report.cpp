#include "lingrowth/config.hpp"
#include "lingrowth/errors.hpp"
#include "lingrowth/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lingrowth;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.kind = "removability";
  r.metadata["density"] = {{"kind", "area"}};
  r.reference = {{"max_abs", 0.123456789012345}};
  EpsilonRecord a;
  a.epsilon = 0.2;
  a.h = 1.0 / 32.0;
  a.deviation_at_probe = 0.1386;
  a.envelope_value = 0.1451;
  a.envelope_satisfied = true;
  a.two_sided_bound_satisfied = true;
  a.iterations = 7;
  a.converged = true;
  EpsilonRecord b = a;
  b.epsilon = 0.1;
  b.uniform_bound = 1.5;
  b.uniform_bound_satisfied = false;
  r.epsilon_records = {a, b};
  r.checks = {{"monotone_decay", true, "ok"}, {"uniform_bound", false, ""}};
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lingrowth_test_report_" + name);
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

} // namespace

TEST_CASE("report round trip through JSON") {
  const ExperimentReport r = sample_report();
  const ExperimentReport back = report_from_json(to_json(r));
  CHECK(back.kind == r.kind);
  REQUIRE(back.epsilon_records.size() == 2);
  CHECK(back.epsilon_records[1].epsilon == 0.1);
  CHECK_FALSE(back.epsilon_records[0].uniform_bound);
  REQUIRE(back.epsilon_records[1].uniform_bound_satisfied);
  CHECK_FALSE(*back.epsilon_records[1].uniform_bound_satisfied);
  CHECK(back.checks.size() == 2);
  CHECK_FALSE(back.all_passed());
  CHECK(to_json(back) == to_json(r));
  CHECK(to_json(r)["passed"] == false);
}

TEST_CASE("other record kinds round trip") {
  ExperimentReport cat;
  cat.kind = "catenoid";
  cat.refinement_records = {{16, 64, 0.09375, 1e-3, 5, std::nullopt}, {32, 128, 0.046875, 2.5e-4, 6, 2.0}};
  cat.convergence_orders = {2.0};
  CHECK(to_json(report_from_json(to_json(cat))) == to_json(cat));

  ExperimentReport cmp;
  cmp.kind = "comparison";
  cmp.comparison_records = {{"random_ordered", 0, 0.3, "holds", -0.01, 1e-9, true}};
  CHECK(to_json(report_from_json(to_json(cmp))) == to_json(cmp));
}

TEST_CASE("empty sweep") {
  ExperimentReport r;
  r.kind = "removability";
  const ExperimentReport back = report_from_json(to_json(r));
  CHECK(back.epsilon_records.empty());
  CHECK(back.all_passed());
  CHECK(records_csv(back) ==
        "epsilon,h,deviation_at_probe,envelope_value,envelope_satisfied,two_sided_bound_satisfied,"
        "uniform_bound,converged\n");
}

TEST_CASE("unknown report kind") {
  json j = to_json(sample_report());
  j["kind"] = "mystery";
  CHECK_THROWS_AS(report_from_json(j), ConfigError);
}

TEST_CASE("canonical form") {
  const json j = {{"b", 0.1 + 0.2}, {"a", {1.0 / 3.0, 7, "x"}}, {"c", std::numeric_limits<double>::infinity()}};
  const json c = canonicalize(j);
  CHECK(c["b"].get<double>() == 0.3);
  CHECK(c["a"][0].get<double>() == 0.333333333333);
  CHECK(c["a"][1] == 7);
  CHECK(c["c"] == "inf");
  const std::string text = dump_canonical(j);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  CHECK(dump_canonical(c) == text);
}

TEST_CASE("written reports are byte-identical and readable") {
  const fs::path dir = scratch_dir("write");
  write_report(sample_report(), dir / "one.json");
  write_report(sample_report(), dir / "two.json");
  CHECK(slurp(dir / "one.json") == slurp(dir / "two.json"));
  CHECK(slurp(dir / "one.csv") == records_csv(sample_report()));
  const ExperimentReport back = read_report(dir / "one.json");
  CHECK(back.epsilon_records.size() == 2);
  CHECK(back.reference["max_abs"].get<double>() == 0.123456789012);
  fs::remove_all(dir);
}

TEST_CASE("I/O failures name the path") {
  const fs::path bad = fs::temp_directory_path() / "lingrowth_no_such_dir" / "sub" / "r.json";
  try {
    write_report(sample_report(), bad);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }
  CHECK_THROWS_AS(read_report(bad), std::runtime_error);

  const fs::path dir = scratch_dir("malformed");
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(read_report(dir / "broken.json"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("config parsers reject unknown keys and bad values") {
  CHECK_THROWS_AS(density_from_json({{"kind", "area"}, {"extra", 1}}), ConfigError);
  CHECK_THROWS_AS(density_from_json({{"kind", "mu"}}), ConfigError);
  CHECK_THROWS_AS(density_from_json({{"kind", "mu"}, {"mu", 0.5}}), ConfigError);
  CHECK_THROWS_AS(density_from_json({{"kind", "cubic"}}), ConfigError);
  CHECK_THROWS_AS(density_from_json({{"kind", 3}}), ConfigError);
  CHECK_THROWS_AS(catenoid_from_json({{"alpha", 1.0}, {"sign", "up"}}), ConfigError);
  CHECK_THROWS_AS(catenoid_from_json({{"alpha", 1.0}, {"convention", "other"}}), ConfigError);
  CHECK_THROWS_AS(solver_options_from_json({{"max_iter", -1}}), ConfigError);
  CHECK_THROWS_AS(solver_options_from_json({{"tolerance", 1e-9}}), ConfigError);
  CHECK_THROWS_AS(removability_from_json({{"epsilons", {0.2, 0.7}}}), ConfigError);
  CHECK_THROWS_AS(outer_data_from_json({{"kind", "affine"}, {"slope", {1.0}}}), ConfigError);
  CHECK_THROWS_AS(outer_data_from_json({{"kind", "samples"}}), ConfigError);
}

TEST_CASE("config round trips") {
  for (const Density& d : {make_area_density(), make_mu_density(2.5)}) {
    CHECK(density_to_json(density_from_json(density_to_json(d))) == density_to_json(d));
  }
  const json spec = {{"sign", "minus"}, {"alpha", 0.25}, {"a", 1.5}, {"n", 3}, {"convention", "unit"}};
  CHECK(catenoid_to_json(catenoid_from_json(spec)) == spec);

  const RemovabilityConfig cfg;
  CHECK(removability_to_json(removability_from_json(removability_to_json(cfg))) == removability_to_json(cfg));
  CHECK(removability_to_json(cfg)["annulus_mesh"]["inner_spacing"] == 1e-3);

  const ComparisonSuiteConfig cmp;
  CHECK(comparison_suite_to_json(comparison_suite_from_json(comparison_suite_to_json(cmp))) ==
        comparison_suite_to_json(cmp));

  const CatenoidReproductionConfig rep;
  CHECK(catenoid_reproduction_to_json(catenoid_reproduction_from_json(catenoid_reproduction_to_json(rep))) ==
        catenoid_reproduction_to_json(rep));
}
