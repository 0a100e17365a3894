#include "lingrowth/experiments.hpp"

#include "lingrowth/config.hpp"
#include "lingrowth/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace lingrowth {

std::function<double(const Point&)> OuterData::bind(const Density& d, double outer_radius) const {
  switch (kind) {
  case Kind::Affine: {
    const Eigen::Vector2d q = slope;
    const double c = constant;
    return [q, c](const Point& x) { return c + q.dot(x); };
  }
  case Kind::Radial: {
    const double value = profile_value(d, radial, outer_radius);
    return [value](const Point&) { return value; };
  }
  case Kind::Samples: {
    if (samples.empty()) {
      throw ConfigError("outer data: sample list is empty");
    }
    const std::vector<double> s = samples;
    return [s](const Point& x) {
      double theta = std::atan2(x.y(), x.x());
      if (theta < 0.0) {
        theta += 2.0 * std::numbers::pi;
      }
      const double pos = theta / (2.0 * std::numbers::pi) * static_cast<double>(s.size());
      const auto i = static_cast<std::size_t>(std::floor(pos)) % s.size();
      const double frac = pos - std::floor(pos);
      return (1.0 - frac) * s[i] + frac * s[(i + 1) % s.size()];
    };
  }
  }
  throw ConfigError("outer data: unknown kind");
}

void RemovabilityConfig::check() const {
  if (!(outer_radius > 0.0)) {
    throw ConfigError("removability: outer radius must be positive");
  }
  if (!(probe_radius > 0.0 && probe_radius < outer_radius)) {
    throw ConfigError("removability: probe radius must lie in (0, R)");
  }
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0 && epsilons[k] < probe_radius)) {
      std::ostringstream msg;
      msg << "removability: epsilon " << epsilons[k] << " must lie in (0, probe radius "
          << probe_radius << ")";
      throw ConfigError(msg.str());
    }
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) {
      throw ConfigError("removability: epsilons must be strictly decreasing");
    }
  }
  if (!annulus_mesh_per_epsilon.empty() && annulus_mesh_per_epsilon.size() != epsilons.size()) {
    throw ConfigError("removability: per-epsilon mesh list must match the epsilon list");
  }
  if (!std::isfinite(spike)) {
    throw ConfigError("removability: spike must be finite");
  }
}

bool ExperimentReport::all_passed() const {
  return complete && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

int sweep_threads() {
  if (const char* env = std::getenv("LINGROWTH_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) {
      return n;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs body(0..count-1) on up to sweep_threads() workers; results are written
// by index, so the outcome does not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(sweep_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// sum_{k=0}^{K} a_k cos(k theta) + b_k sin(k theta)
struct FourierSeries {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  static FourierSeries draw(std::mt19937_64& rng, int degree) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    FourierSeries f;
    for (int k = 0; k <= degree; ++k) {
      f.cos_coeffs.push_back(coeff(rng));
      f.sin_coeffs.push_back(k == 0 ? 0.0 : coeff(rng));
    }
    return f;
  }

  double operator()(const Point& x) const {
    const double theta = std::atan2(x.y(), x.x());
    double sum = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
      sum += cos_coeffs[k] * std::cos(k * theta) + sin_coeffs[k] * std::sin(k * theta);
    }
    return sum;
  }
};

// Independent series on the inner and outer circles.
struct RingData {
  FourierSeries inner;
  FourierSeries outer;

  BoundaryData sample(const PolarMesh& mesh) const {
    BoundaryData data;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const BoundaryTag tag = mesh.boundary_tags()[i];
      if (tag == BoundaryTag::Inner) {
        data[i] = inner(mesh.nodes()[i]);
      } else if (tag == BoundaryTag::Outer) {
        data[i] = outer(mesh.nodes()[i]);
      }
    }
    return data;
  }
};

} // namespace

double envelope_width(const Density& d, double epsilon, double probe, double outer_radius) {
  return envelope_bound(d, epsilon, probe, outer_radius, 0.0, 2);
}

PolarMesh MeshResolution::build(double r_in, double r_out) const {
  if (inner_spacing > 0.0 && inner_spacing < (r_out - r_in) / n_r) {
    return PolarMesh::with_inner_layer(r_in, r_out, n_r, n_theta, inner_spacing);
  }
  return PolarMesh(r_in, r_out, n_r, n_theta);
}

ExperimentReport run_removability(const Density& d, const RemovabilityConfig& cfg) {
  cfg.check();
  const double R = cfg.outer_radius;
  const auto outer = cfg.outer.bind(d, R);
  const Growth growth = classify_growth(d);
  const bool blowup_case = growth == Growth::InfiniteIntegral;

  ExperimentReport report;
  report.kind = "removability";
  report.metadata["density"] = density_to_json(d);
  report.metadata["growth"] = to_string(growth);
  report.metadata["config"] = removability_to_json(cfg);
  report.metadata["dimension"] = 2;

  auto ref_mesh = std::make_shared<const PolarMesh>(0.0, R, cfg.reference_mesh.n_r,
                                                    cfg.reference_mesh.n_theta);
  const DiscreteSolution reference = solve_dirichlet(d, ref_mesh, sample_boundary(*ref_mesh, outer), cfg.solver);
  report.reference = diagnostics_to_json(reference);
  report.reference["n_r"] = ref_mesh->n_r();
  report.reference["n_theta"] = ref_mesh->n_theta();
  report.reference["h"] = ref_mesh->h();

  const double inverse_half = blowup_case ? invert_gprime(d, 0.5) : 0.0;
  const int count = static_cast<int>(cfg.epsilons.size());
  std::vector<EpsilonRecord> records(static_cast<std::size_t>(count));

  parallel_for(count, [&](int k) {
    const double eps = cfg.epsilons[static_cast<std::size_t>(k)];
    const MeshResolution res =
        cfg.annulus_mesh_per_epsilon.empty() ? cfg.annulus_mesh : cfg.annulus_mesh_per_epsilon[static_cast<std::size_t>(k)];
    auto mesh = std::make_shared<const PolarMesh>(res.build(eps, R));

    BoundaryData data;
    double outer_min = std::numeric_limits<double>::infinity();
    double outer_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh->num_nodes(); ++i) {
      const Point& x = mesh->nodes()[i];
      if (mesh->boundary_tags()[i] == BoundaryTag::Outer) {
        data[i] = outer(x);
        outer_min = std::min(outer_min, data[i]);
        outer_max = std::max(outer_max, data[i]);
      } else if (mesh->boundary_tags()[i] == BoundaryTag::Inner) {
        data[i] = ref_mesh->interpolate(reference.values, x) + cfg.spike;
      }
    }

    EpsilonRecord rec;
    rec.epsilon = eps;
    rec.h = mesh->h();
    rec.envelope_value = envelope_width(d, eps, cfg.probe_radius, R);

    DiscreteSolution sol;
    try {
      sol = solve_dirichlet(d, mesh, data, cfg.solver);
    } catch (const NonConvergenceError& e) {
      sol = e.diagnostics();
    }
    rec.converged = sol.converged;
    rec.iterations = sol.iterations;

    const double allowance = discretization_allowance(rec.h);
    const double E = rec.envelope_value;
    double deviation = 0.0;
    bool two_sided = true;
    bool uniform = true;
    for (int i = 0; i < mesh->num_nodes(); ++i) {
      const Point& x = mesh->nodes()[i];
      const double rho = x.norm();
      if (rho < cfg.probe_radius - 1e-12) {
        continue;
      }
      const double u = sol.values[static_cast<std::size_t>(i)];
      deviation = std::max(deviation, std::abs(u - ref_mesh->interpolate(reference.values, x)));
      if (u > outer_max + E + allowance || u < outer_min - E - allowance) {
        two_sided = false;
      }
      if (blowup_case) {
        const double width = std::max(0.0, R - rho) * inverse_half;
        if (u > outer_max + width + allowance || u < outer_min - width - allowance) {
          uniform = false;
        }
      }
    }
    rec.deviation_at_probe = deviation;
    rec.envelope_satisfied = deviation <= E + allowance;
    rec.two_sided_bound_satisfied = two_sided;
    if (blowup_case) {
      rec.uniform_bound = uniform_bound_blowup_case(d, outer_max, cfg.probe_radius, R);
      rec.uniform_bound_satisfied = uniform;
    }
    records[static_cast<std::size_t>(k)] = rec;
  });

  report.epsilon_records = records;
  report.complete = std::all_of(records.begin(), records.end(), [](const EpsilonRecord& r) { return r.converged; });

  bool envelope_ok = true;
  bool two_sided_ok = true;
  bool monotone = true;
  bool envelope_decreasing = true;
  bool uniform_ok = true;
  for (std::size_t k = 0; k < records.size(); ++k) {
    envelope_ok = envelope_ok && records[k].envelope_satisfied;
    two_sided_ok = two_sided_ok && records[k].two_sided_bound_satisfied;
    if (records[k].uniform_bound_satisfied) {
      uniform_ok = uniform_ok && *records[k].uniform_bound_satisfied;
    }
    if (k > 0) {
      monotone = monotone && records[k].deviation_at_probe <= records[k - 1].deviation_at_probe + 1e-6;
      envelope_decreasing = envelope_decreasing && records[k].envelope_value < records[k - 1].envelope_value;
    }
  }
  std::ostringstream deviations;
  for (const auto& r : records) {
    deviations << (deviations.tellp() > 0 ? ", " : "") << fmt(r.deviation_at_probe);
  }
  report.checks.push_back({"reference_converged", reference.converged, ""});
  report.checks.push_back({"all_solves_converged", report.complete, ""});
  report.checks.push_back({"deviation_within_envelope", envelope_ok, "deviations: " + deviations.str()});
  report.checks.push_back({"two_sided_bound", two_sided_ok, ""});
  report.checks.push_back({"monotone_decay", monotone, "deviations: " + deviations.str()});
  report.checks.push_back({"envelope_decreasing", envelope_decreasing, ""});
  if (blowup_case) {
    report.checks.push_back({"uniform_bound", uniform_ok, "(g')^{-1}(1/2) = " + fmt(inverse_half)});
  }
  return report;
}

ExperimentReport run_catenoid_reproduction(const Density& d, const CatenoidReproductionConfig& cfg,
                                           int refinements) {
  cfg.spec.check();
  if (refinements < 1) {
    throw ConfigError("catenoid reproduction: need at least one refinement level");
  }
  if (!(cfg.r_in > cfg.spec.neck_radius())) {
    std::ostringstream msg;
    msg << "catenoid reproduction: inner radius " << cfg.r_in << " must exceed the neck radius "
        << cfg.spec.neck_radius();
    throw ConfigError(msg.str());
  }

  ExperimentReport report;
  report.kind = "catenoid";
  report.metadata["density"] = density_to_json(d);
  report.metadata["config"] = catenoid_reproduction_to_json(cfg);
  report.metadata["refinements"] = refinements;

  for (int level = 0; level < refinements; ++level) {
    auto mesh = std::make_shared<const PolarMesh>(cfg.r_in, cfg.r_out, cfg.base_n_r << level,
                                                  cfg.base_n_theta << level);
    std::vector<double> exact_ring(static_cast<std::size_t>(mesh->n_r() + 1));
    for (int i = 0; i <= mesh->n_r(); ++i) {
      exact_ring[static_cast<std::size_t>(i)] = profile_value(d, cfg.spec, mesh->ring_radius(i));
    }
    BoundaryData data;
    for (int i = 0; i < mesh->num_nodes(); ++i) {
      if (mesh->is_boundary(i)) {
        data[i] = exact_ring[static_cast<std::size_t>(mesh->ring_of(i))];
      }
    }
    DiscreteSolution sol;
    try {
      sol = solve_dirichlet(d, mesh, data, cfg.solver);
    } catch (const NonConvergenceError& e) {
      sol = e.diagnostics();
      report.complete = false;
    }
    RefinementRecord rec;
    rec.n_r = mesh->n_r();
    rec.n_theta = mesh->n_theta();
    rec.h = mesh->h();
    rec.iterations = sol.iterations;
    for (int i = 0; i < mesh->num_nodes(); ++i) {
      rec.max_error = std::max(rec.max_error, std::abs(sol.values[static_cast<std::size_t>(i)] -
                                                       exact_ring[static_cast<std::size_t>(mesh->ring_of(i))]));
    }
    if (!report.refinement_records.empty()) {
      const RefinementRecord& prev = report.refinement_records.back();
      rec.order = std::log(prev.max_error / rec.max_error) / std::log(prev.h / rec.h);
      report.convergence_orders.push_back(*rec.order);
    }
    report.refinement_records.push_back(rec);
  }

  report.checks.push_back({"all_solves_converged", report.complete, ""});
  if (!report.convergence_orders.empty()) {
    const double worst = *std::min_element(report.convergence_orders.begin(), report.convergence_orders.end());
    report.checks.push_back({"convergence_order", worst >= cfg.min_order,
                             "min order " + fmt(worst) + " (required " + fmt(cfg.min_order) + ")"});
  }
  return report;
}

ExperimentReport run_comparison_suite(const Density& d, int trials, std::uint64_t seed,
                                      const ComparisonSuiteConfig& cfg) {
  if (trials < 1) {
    throw ConfigError("comparison suite: trials must be at least 1");
  }
  if (!(cfg.r_in > 0.0)) {
    throw ConfigError("comparison suite: the annulus needs a positive inner radius");
  }
  auto mesh = std::make_shared<const PolarMesh>(cfg.r_in, cfg.r_out, cfg.n_r, cfg.n_theta);
  const double tol = 1e-8 + discretization_allowance(mesh->h());

  ExperimentReport report;
  report.kind = "comparison";
  report.metadata["density"] = density_to_json(d);
  report.metadata["config"] = comparison_suite_to_json(cfg);
  report.metadata["trials"] = trials;
  report.metadata["seed"] = seed;

  // Draw everything up front so that results do not depend on scheduling.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift_dist(-1.0, 1.0);
  struct TrialData {
    RingData u;
    RingData w;
    double M;
  };
  std::vector<TrialData> draws;
  for (int t = 0; t < trials; ++t) {
    TrialData td;
    td.u = {FourierSeries::draw(rng, cfg.fourier_degree), FourierSeries::draw(rng, cfg.fourier_degree)};
    td.w = {FourierSeries::draw(rng, cfg.fourier_degree), FourierSeries::draw(rng, cfg.fourier_degree)};
    td.M = shift_dist(rng);
    draws.push_back(td);
  }
  const FourierSeries barrier_outer = FourierSeries::draw(rng, cfg.fourier_degree);

  std::vector<ComparisonRecord> records(static_cast<std::size_t>(trials));
  std::vector<char> solved(static_cast<std::size_t>(trials), 1);
  parallel_for(trials, [&](int t) {
    const TrialData& td = draws[static_cast<std::size_t>(t)];
    const BoundaryData u_data = td.u.sample(*mesh);
    BoundaryData v_data = td.w.sample(*mesh);
    // Shift v so that u <= v + M on the boundary with equality somewhere.
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& [node, value] : u_data) {
      shift = std::max(shift, value - v_data.at(node) - td.M);
    }
    for (auto& [node, value] : v_data) {
      value += shift;
    }
    ComparisonRecord rec;
    rec.scenario = "random_ordered";
    rec.trial = t;
    rec.M = td.M;
    rec.tolerance = tol;
    try {
      const DiscreteSolution u = solve_dirichlet(d, mesh, u_data, cfg.solver);
      const DiscreteSolution v = solve_dirichlet(d, mesh, v_data, cfg.solver);
      const ComparisonResult cmp = check_comparison(u, v, td.M, tol);
      rec.status = to_string(cmp.status);
      rec.max_violation = cmp.max_violation;
      rec.holds = cmp.holds;
    } catch (const NonConvergenceError&) {
      rec.status = "not-converged";
      solved[static_cast<std::size_t>(t)] = 0;
    }
    records[static_cast<std::size_t>(t)] = rec;
  });
  report.complete = std::all_of(solved.begin(), solved.end(), [](char c) { return c != 0; });
  report.comparison_records = records;

  bool random_ok = std::all_of(records.begin(), records.end(), [](const ComparisonRecord& r) { return r.holds; });
  double worst = 0.0;
  for (const auto& r : records) {
    worst = std::max(worst, r.max_violation);
  }
  report.checks.push_back({"random_pairs_hold", random_ok, "max violation " + fmt(worst) + ", tolerance " + fmt(tol)});

  // Catenoid barrier: a smooth solution on the whole disk restricted to the
  // annulus lies below the downward catenoid with neck on the inner circle
  // that matches max of the outer data on the outer circle.
  if (classify_growth(d) != Growth::InfiniteIntegral) {
    const int disk_n_r = static_cast<int>(std::lround(cfg.n_r * cfg.r_out / (cfg.r_out - cfg.r_in)));
    auto disk = std::make_shared<const PolarMesh>(0.0, cfg.r_out, std::max(3, disk_n_r), cfg.n_theta);
    ComparisonRecord rec;
    rec.scenario = "catenoid_barrier";
    rec.trial = trials;
    rec.tolerance = tol;
    try {
      const DiscreteSolution smooth =
          solve_dirichlet(d, disk, sample_boundary(*disk, barrier_outer), cfg.solver);
      BoundaryData data;
      for (int i = 0; i < mesh->num_nodes(); ++i) {
        if (mesh->is_boundary(i)) {
          data[i] = disk->interpolate(smooth.values, mesh->nodes()[i]);
        }
      }
      const DiscreteSolution u = solve_dirichlet(d, mesh, data, cfg.solver);
      double outer_max = -std::numeric_limits<double>::infinity();
      for (const auto& [node, value] : data) {
        if (mesh->boundary_tags()[node] == BoundaryTag::Outer) {
          outer_max = std::max(outer_max, value);
        }
      }
      const double alpha = cfg.r_in; // r^(n-1) with n = 2
      std::vector<double> barrier(static_cast<std::size_t>(mesh->n_r() + 1));
      for (int i = 0; i <= mesh->n_r(); ++i) {
        barrier[static_cast<std::size_t>(i)] =
            outer_max + radial_integral(d, alpha, 2, mesh->ring_radius(i), cfg.r_out);
      }
      double excess = 0.0;
      for (int i = 0; i < mesh->num_nodes(); ++i) {
        excess = std::max(excess, u.values[static_cast<std::size_t>(i)] -
                                      barrier[static_cast<std::size_t>(mesh->ring_of(i))]);
      }
      rec.M = outer_max;
      rec.max_violation = excess;
      rec.holds = excess <= tol;
      rec.status = rec.holds ? "holds" : "violated";
    } catch (const NonConvergenceError&) {
      rec.status = "not-converged";
      report.complete = false;
    }
    report.comparison_records.push_back(rec);
    report.checks.push_back({"catenoid_barrier_holds", rec.holds,
                             "max excess over barrier " + fmt(rec.max_violation)});
  }
  report.checks.insert(report.checks.begin(), Check{"all_solves_converged", report.complete, ""});
  return report;
}

} // namespace lingrowth
