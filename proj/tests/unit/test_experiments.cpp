#include "lingrowth/errors.hpp"
#include "lingrowth/experiments.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace lingrowth;
using doctest::Approx;

namespace {

RemovabilityConfig small_sweep() {
  RemovabilityConfig cfg;
  cfg.epsilons = {0.2, 0.1};
  cfg.reference_mesh = {16, 32};
  cfg.annulus_mesh = {16, 32, 2e-3};
  return cfg;
}

const Check* find_check(const ExperimentReport& r, const std::string& name) {
  for (const Check& c : r.checks) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

} // namespace

TEST_CASE("envelope width matches the closed form for the area integrand") {
  const Density d = make_area_density();
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    CHECK(envelope_width(d, eps, 0.5, 1.0) == Approx(oracle::area_envelope(eps, 0.5, 1.0)).epsilon(1e-10));
  }
  CHECK(envelope_width(d, 0.025, 0.5, 1.0) < 0.02);
}

TEST_CASE("removability without a spike leaves affine data untouched") {
  RemovabilityConfig cfg = small_sweep();
  cfg.spike = 0.0;
  cfg.outer.slope = {0.3, -0.1};
  cfg.outer.constant = 0.2;
  const ExperimentReport r = run_removability(make_area_density(), cfg);
  REQUIRE(r.epsilon_records.size() == 2);
  for (const EpsilonRecord& rec : r.epsilon_records) {
    CHECK(rec.converged);
    CHECK(rec.deviation_at_probe <= 1e-8);
    CHECK(rec.deviation_at_probe <= discretization_allowance(rec.h));
  }
  CHECK(r.all_passed());
}

TEST_CASE("removability sweep is bounded by the envelope regardless of the spike") {
  for (double spike : {1.0, 5.0}) {
    RemovabilityConfig cfg = small_sweep();
    cfg.spike = spike;
    const ExperimentReport r = run_removability(make_area_density(), cfg);
    CAPTURE(spike);
    for (const EpsilonRecord& rec : r.epsilon_records) {
      CHECK(rec.deviation_at_probe > 0.0);
      CHECK(rec.deviation_at_probe <= rec.envelope_value + 2.0 * discretization_allowance(rec.h));
    }
    CHECK(r.epsilon_records[0].envelope_value > r.epsilon_records[1].envelope_value);
    REQUIRE(find_check(r, "monotone_decay"));
    CHECK(find_check(r, "monotone_decay")->passed);
    CHECK_FALSE(find_check(r, "uniform_bound"));
  }
}

TEST_CASE("blow-up case records the uniform bound") {
  const ExperimentReport r = run_removability(make_mu_density(2.0), small_sweep());
  REQUIRE(find_check(r, "uniform_bound"));
  for (const EpsilonRecord& rec : r.epsilon_records) {
    REQUIRE(rec.uniform_bound);
    REQUIRE(rec.uniform_bound_satisfied);
    CHECK(*rec.uniform_bound_satisfied);
  }
  CHECK(r.metadata["growth"] == "InfiniteIntegral");
}

TEST_CASE("removability config checks") {
  RemovabilityConfig cfg;
  CHECK_NOTHROW(cfg.check());
  cfg.epsilons = {0.2, 0.6};
  CHECK_THROWS_AS(cfg.check(), ConfigError);
  cfg.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(cfg.check(), ConfigError);
  cfg.epsilons = {0.1};
  cfg.probe_radius = 1.5;
  CHECK_THROWS_AS(cfg.check(), ConfigError);
  cfg = RemovabilityConfig{};
  cfg.epsilons.clear();
  cfg.reference_mesh = {8, 16};
  const ExperimentReport empty = run_removability(make_area_density(), cfg);
  CHECK(empty.epsilon_records.empty());
  CHECK(empty.kind == "removability");
}

TEST_CASE("catenoid reproduction") {
  CatenoidReproductionConfig cfg;
  cfg.spec.alpha = 1.0;
  cfg.base_n_r = 8;
  cfg.base_n_theta = 32;

  SUBCASE("one level has no order") {
    const ExperimentReport r = run_catenoid_reproduction(make_area_density(), cfg, 1);
    REQUIRE(r.refinement_records.size() == 1);
    CHECK_FALSE(r.refinement_records[0].order);
    CHECK(r.convergence_orders.empty());
  }
  SUBCASE("second order for mu = 3") {
    const ExperimentReport r = run_catenoid_reproduction(make_mu_density(3.0), cfg, 3);
    REQUIRE(r.refinement_records.size() == 3);
    CHECK(r.refinement_records[1].n_r == 16);
    CHECK(r.refinement_records[2].n_theta == 128);
    REQUIRE(r.convergence_orders.size() == 2);
    for (double order : r.convergence_orders) {
      CHECK(order >= 1.8);
    }
    CHECK(r.all_passed());
  }
}

TEST_CASE("comparison suite") {
  ComparisonSuiteConfig cfg;
  cfg.n_r = 8;
  cfg.n_theta = 24;
  const ExperimentReport r = run_comparison_suite(make_mu_density(3.0), 4, 7, cfg);
  CHECK(r.kind == "comparison");
  int random = 0;
  for (const ComparisonRecord& rec : r.comparison_records) {
    random += rec.scenario == "random_ordered";
    CHECK(rec.holds);
  }
  CHECK(random == 4);
  CHECK(find_check(r, "catenoid_barrier_holds"));
  CHECK(r.all_passed());
}

TEST_CASE("sweeps are deterministic and thread-independent") {
  ComparisonSuiteConfig cfg;
  cfg.n_r = 6;
  cfg.n_theta = 18;
  setenv("LINGROWTH_THREADS", "1", 1);
  CHECK(sweep_threads() == 1);
  const ExperimentReport a = run_comparison_suite(make_area_density(), 3, 11, cfg);
  setenv("LINGROWTH_THREADS", "3", 1);
  CHECK(sweep_threads() == 3);
  const ExperimentReport b = run_comparison_suite(make_area_density(), 3, 11, cfg);
  unsetenv("LINGROWTH_THREADS");
  REQUIRE(a.comparison_records.size() == b.comparison_records.size());
  for (std::size_t i = 0; i < a.comparison_records.size(); ++i) {
    CHECK(a.comparison_records[i].max_violation == b.comparison_records[i].max_violation);
    CHECK(a.comparison_records[i].M == b.comparison_records[i].M);
  }
  const ExperimentReport c = run_comparison_suite(make_area_density(), 3, 12, cfg);
  CHECK(c.comparison_records[0].M != a.comparison_records[0].M);
  CHECK(sweep_threads() >= 1);
}
