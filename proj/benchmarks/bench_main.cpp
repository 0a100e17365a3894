#include "lingrowth/catenoid.hpp"
#include "lingrowth/density.hpp"
#include "lingrowth/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace lingrowth;

namespace {

Density density_for(int id) {
  switch (id) {
  case 0:
    return make_area_density();
  case 1:
    return make_mu_density(2.0);
  default:
    return make_mu_density(3.0);
  }
}

void BM_ProfileValue(benchmark::State& state) {
  const Density d = density_for(static_cast<int>(state.range(0)));
  CatenoidSpec spec;
  spec.alpha = 0.5;
  if (d.kind() == DensityKind::Mu && *d.mu() <= 2.0) {
    spec.anchor = Anchor::Unit;
  }
  double rho = 0.51;
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_value(d, spec, rho));
    rho = rho > 5.0 ? 0.51 : rho * 1.07;
  }
}
BENCHMARK(BM_ProfileValue)->Arg(0)->Arg(1)->Arg(2);

void BM_InvertGprime(benchmark::State& state) {
  Density::CustomOptions opts;
  const Density analytic = make_mu_density(3.0);
  const Density numeric = Density::custom([&](double t) { return analytic.eval(t); }, opts);
  const Density& d = state.range(0) == 0 ? analytic : numeric;
  double y = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_gprime(d, y));
    y = y > 0.98 ? 0.01 : y + 0.013;
  }
}
BENCHMARK(BM_InvertGprime)->Arg(0)->Arg(1);

void BM_SolveDirichlet(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  const Density d = make_area_density();
  const auto mesh = std::make_shared<const PolarMesh>(1.5, 3.0, n_r, 4 * n_r);
  const BoundaryData data = sample_boundary(*mesh, [](const Point& x) { return std::acosh(x.norm()); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dirichlet(d, mesh, data).energy);
  }
  state.counters["nodes"] = mesh->num_nodes();
}
BENCHMARK(BM_SolveDirichlet)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
