#include "commands.hpp"

#include "lingrowth/catenoid.hpp"
#include "lingrowth/config.hpp"
#include "lingrowth/density.hpp"
#include "lingrowth/errors.hpp"
#include "lingrowth/experiments.hpp"
#include "lingrowth/format.hpp"
#include "lingrowth/mesh.hpp"
#include "lingrowth/report.hpp"
#include "lingrowth/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lingrowth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct DensityFlags {
  std::optional<std::string> kind;
  std::optional<double> mu;
};

struct CatenoidFlags {
  std::optional<std::string> sign;
  std::optional<double> alpha;
  std::optional<double> a;
  std::optional<int> n;
  std::optional<std::string> convention;
  std::optional<double> rho_min;
  std::optional<double> rho_max;
  std::optional<int> samples;
};

struct SolveFlags {
  std::optional<double> r_in;
  std::optional<double> r_out;
  std::optional<int> n_r;
  std::optional<int> n_theta;
  std::optional<std::string> boundary;
  std::vector<double> slope;
  std::optional<double> c;
  std::optional<int> max_iter;
  std::optional<double> grad_tol;
};

struct ExperimentFlags {
  std::optional<std::string> kind;
  std::optional<int> trials;
  std::optional<int> refinements;
  std::optional<double> spike;
  std::vector<double> epsilons;
};

// Output sink that honours --quiet.
class Console {
public:
  Console(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}

  template <typename T>
  Console& operator<<(const T& value) {
    if (!quiet_) {
      out_ << value;
    }
    return *this;
  }

private:
  std::ostream& out_;
  bool quiet_;
};

json load_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config file '" + path + "' must hold a JSON object");
  }
  return j;
}

json& section(json& root, const char* key) {
  if (!root.contains(key)) {
    root[key] = json::object();
  }
  if (!root[key].is_object()) {
    throw ConfigError(std::string("config: '") + key + "' must be a JSON object");
  }
  return root[key];
}

template <typename T>
void override_key(json& j, const char* key, const std::optional<T>& value) {
  if (value) {
    j[key] = *value;
  }
}

// Moves `key` out of `j` (so that strict parsers do not see it) and returns it.
template <typename T>
T take(json& j, const char* key, T fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  T value;
  try {
    value = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
  j.erase(key);
  return value;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed for '" + path.string() + "'");
  }
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
  return path;
}

Density resolve_density(json& root, const DensityFlags& flags) {
  json& d = section(root, "density");
  override_key(d, "kind", flags.kind);
  override_key(d, "mu", flags.mu);
  if (!d.contains("kind")) {
    d["kind"] = "area";
  }
  return density_from_json(d);
}

std::vector<double> validation_samples() {
  std::vector<double> samples{0.0};
  for (int k = 0; k <= 70; ++k) {
    samples.push_back(std::pow(10.0, -3.0 + 0.1 * k));
  }
  return samples;
}

int cmd_density(json& root, const GlobalFlags& global, const DensityFlags& flags, Console& console) {
  const Density d = resolve_density(root, flags);
  const fs::path out = prepare_out_dir(global.out_dir);

  const ValidationReport report = validate(d, validation_samples());
  const Growth growth = classify_growth(d);
  json result;
  result["density"] = density_to_json(d);
  result["validation"] = validation_to_json(report);
  result["hypotheses_ok"] = report.all_ok();
  result["growth"] = to_string(growth);
  result["gprime_inf"] = d.gprime_inf() ? json(*d.gprime_inf()) : json(nullptr);
  if (const auto decay = d.decay()) {
    result["decay_bound"] = {{"c", decay->c}, {"mu", decay->mu}};
  }
  if (growth == Growth::InfiniteIntegral) {
    result["inverse_gprime_half"] = invert_gprime(d, 0.5);
  }
  write_text(out / "density.json", dump_canonical(result));
  write_text(out / "config.json", dump_canonical({{"density", density_to_json(d)}}));

  const auto& b = report.linear_growth_bounds;
  console << "density        " << d.label() << '\n'
          << "growth         " << to_string(growth) << '\n'
          << "linear growth  " << (report.linear_growth_ok ? "ok" : "VIOLATED") << "  (a=" << format_real(b.a_est)
          << ", b=" << format_real(b.b_est) << ", A=" << format_real(b.A_est) << ", B=" << format_real(b.B_est)
          << ")\n"
          << "convexity      " << (report.convexity_ok ? "ok" : "VIOLATED") << '\n'
          << "g'(0) = 0      " << (report.origin_ok ? "ok" : "VIOLATED") << '\n'
          << "derivatives    max rel. error " << format_real(report.derivative_consistency) << '\n';
  return report.all_ok() ? kOk : kDomainViolation;
}

int cmd_catenoid(json& root, const GlobalFlags& global, const DensityFlags& dflags, const CatenoidFlags& flags,
                 Console& console) {
  const Density d = resolve_density(root, dflags);
  json& c = section(root, "catenoid");
  override_key(c, "sign", flags.sign);
  override_key(c, "alpha", flags.alpha);
  override_key(c, "a", flags.a);
  override_key(c, "n", flags.n);
  override_key(c, "convention", flags.convention);
  override_key(c, "rho_min", flags.rho_min);
  override_key(c, "rho_max", flags.rho_max);
  override_key(c, "samples", flags.samples);

  json spec_json = c;
  const bool has_min = spec_json.contains("rho_min");
  const bool has_max = spec_json.contains("rho_max");
  const double rho_min_in = take(spec_json, "rho_min", 0.0);
  const double rho_max_in = take(spec_json, "rho_max", 0.0);
  const int samples = take(spec_json, "samples", 100);
  const CatenoidSpec spec = catenoid_from_json(spec_json);
  const double neck = spec.neck_radius();
  const double rho_min = has_min ? rho_min_in : 1.01 * neck;
  const double rho_max = has_max ? rho_max_in : 5.0 * neck;
  if (samples < 3) {
    throw ConfigError("catenoid: need at least 3 samples");
  }

  const RadialProfile profile = make_profile(d, spec, rho_min, rho_max, samples);
  const double residual = ode_residual(d, profile);

  const fs::path out = prepare_out_dir(global.out_dir);
  std::ostringstream csv;
  write_profile_csv(profile, csv);
  write_text(out / "profile.csv", csv.str());

  json echo_spec = catenoid_to_json(spec);
  echo_spec["rho_min"] = rho_min;
  echo_spec["rho_max"] = rho_max;
  echo_spec["samples"] = samples;
  write_text(out / "config.json", dump_canonical({{"density", density_to_json(d)}, {"catenoid", echo_spec}}));
  json summary = {{"catenoid", catenoid_to_json(spec)},
                  {"neck_radius", neck},
                  {"neck_finite", profile.neck_finite},
                  {"ode_residual", residual},
                  {"samples", samples}};
  const double neck_value = profile_value_substituted(d, spec, neck);
  summary["neck_value"] = neck_value;
  write_text(out / "catenoid.json", dump_canonical(summary));

  console << "neck radius    " << format_real(neck) << '\n'
          << "samples        " << samples << " on [" << format_real(rho_min) << ", " << format_real(rho_max) << "]\n"
          << "ode residual   " << format_real(residual) << '\n';
  console << "neck value     " << format_real(neck_value);
  if (!std::isfinite(neck_value)) {
    console << " (the profile is unbounded as rho approaches the neck)";
  }
  console << '\n';
  return kOk;
}

struct BoundaryFunction {
  std::function<double(const Point&)> exact;
  json echo;
};

BoundaryFunction resolve_boundary(const Density& d, json& boundary, const SolveFlags& flags) {
  override_key(boundary, "kind", flags.boundary);
  if (!flags.slope.empty()) {
    boundary["slope"] = flags.slope;
  }
  override_key(boundary, "c", flags.c);
  const std::string kind = boundary.value("kind", "affine");
  if (kind == "affine") {
    json copy = boundary;
    copy["kind"] = "affine";
    if (!copy.contains("slope")) {
      copy["slope"] = {0.25, 0.0};
    }
    const OuterData data = outer_data_from_json(copy);
    const Eigen::Vector2d q = data.slope;
    const double c = data.constant;
    return {[q, c](const Point& x) { return c + q.dot(x); }, outer_data_to_json(data)};
  }
  if (kind == "catenoid") {
    json copy = boundary;
    copy.erase("kind");
    const json spec_json = take(copy, "catenoid", json::object());
    if (!copy.empty()) {
      throw ConfigError("config: catenoid boundary data takes only 'kind' and 'catenoid'");
    }
    const CatenoidSpec spec = catenoid_from_json(spec_json);
    if (spec.dim != 2) {
      throw ConfigError("config: planar solves need catenoid data with n = 2");
    }
    return {[&d, spec](const Point& x) { return profile_value(d, spec, x.norm()); },
            {{"kind", "catenoid"}, {"catenoid", catenoid_to_json(spec)}}};
  }
  throw ConfigError("config: unknown boundary kind '" + kind + "' (expected affine or catenoid)");
}

int cmd_solve(json& root, const GlobalFlags& global, const DensityFlags& dflags, const SolveFlags& flags,
              Console& console) {
  const Density d = resolve_density(root, dflags);
  json& s = section(root, "solve");
  json& mesh_json = section(s, "mesh");
  override_key(mesh_json, "r_in", flags.r_in);
  override_key(mesh_json, "r_out", flags.r_out);
  override_key(mesh_json, "n_r", flags.n_r);
  override_key(mesh_json, "n_theta", flags.n_theta);
  json& solver_json = section(s, "solver");
  override_key(solver_json, "max_iter", flags.max_iter);
  override_key(solver_json, "grad_tol", flags.grad_tol);
  for (auto it = s.begin(); it != s.end(); ++it) {
    if (it.key() != "mesh" && it.key() != "solver" && it.key() != "boundary") {
      throw ConfigError("config: unknown key '" + it.key() + "' in solve");
    }
  }

  json mesh_copy = mesh_json;
  const double r_in = take(mesh_copy, "r_in", 0.5);
  const double r_out = take(mesh_copy, "r_out", 1.0);
  const int n_r = take(mesh_copy, "n_r", 16);
  const int n_theta = take(mesh_copy, "n_theta", 32);
  if (!mesh_copy.empty()) {
    throw ConfigError("config: unknown key '" + mesh_copy.begin().key() + "' in solve.mesh");
  }
  const auto mesh = std::make_shared<const PolarMesh>(r_in, r_out, n_r, n_theta);
  const SolverOptions opts = solver_options_from_json(solver_json);
  const BoundaryFunction boundary = resolve_boundary(d, section(s, "boundary"), flags);

  const fs::path out = prepare_out_dir(global.out_dir);
  const json echo = {{"density", density_to_json(d)},
                     {"solve",
                      {{"mesh", {{"r_in", r_in}, {"r_out", r_out}, {"n_r", n_r}, {"n_theta", n_theta}}},
                       {"solver", solver_options_to_json(opts)},
                       {"boundary", boundary.echo}}}};
  write_text(out / "config.json", dump_canonical(echo));

  const BoundaryData data = sample_boundary(*mesh, boundary.exact);
  DiscreteSolution sol;
  bool converged = true;
  try {
    sol = solve_dirichlet(d, mesh, data, opts);
  } catch (const NonConvergenceError& e) {
    sol = e.diagnostics();
    converged = false;
  }

  json diagnostics = diagnostics_to_json(sol);
  double max_error = 0.0;
  for (int i = 0; i < mesh->num_nodes(); ++i) {
    max_error = std::max(max_error, std::abs(sol.values[static_cast<std::size_t>(i)] - boundary.exact(mesh->nodes()[i])));
  }
  diagnostics["max_error_vs_exact"] = max_error;
  diagnostics["residual"] = residual_EL(d, sol);
  diagnostics["h"] = mesh->h();
  std::ostringstream csv;
  write_solution_csv(sol, csv);
  write_text(out / "solution.csv", csv.str());
  write_text(out / "diagnostics.json", dump_canonical(diagnostics));

  console << "nodes          " << mesh->num_nodes() << '\n'
          << "converged      " << (converged ? "yes" : "no") << " after " << sol.iterations << " iterations\n"
          << "energy         " << format_real(sol.energy) << '\n'
          << "gradient norm  " << format_real(sol.grad_norm) << '\n'
          << "max error      " << format_real(max_error) << " (against the exact solution)\n";
  return converged ? kOk : kNonConvergence;
}

int cmd_experiment(json& root, const GlobalFlags& global, const DensityFlags& dflags, const ExperimentFlags& flags,
                   Console& console) {
  const Density d = resolve_density(root, dflags);
  json& e = section(root, "experiment");
  override_key(e, "kind", flags.kind);
  override_key(e, "trials", flags.trials);
  override_key(e, "refinements", flags.refinements);
  override_key(e, "spike", flags.spike);
  if (!flags.epsilons.empty()) {
    e["epsilons"] = flags.epsilons;
  }
  const std::string kind = e.value("kind", "");
  const std::uint64_t seed = root.value("seed", std::uint64_t{0});

  ExperimentReport report;
  json echo_experiment;
  if (kind == "removability") {
    const RemovabilityConfig cfg = removability_from_json(e);
    echo_experiment = removability_to_json(cfg);
    report = run_removability(d, cfg);
  } else if (kind == "catenoid") {
    const int refinements = e.value("refinements", 3);
    const CatenoidReproductionConfig cfg = catenoid_reproduction_from_json(e);
    echo_experiment = catenoid_reproduction_to_json(cfg);
    echo_experiment["refinements"] = refinements;
    report = run_catenoid_reproduction(d, cfg, refinements);
  } else if (kind == "comparison") {
    const int trials = e.value("trials", 20);
    const ComparisonSuiteConfig cfg = comparison_suite_from_json(e);
    echo_experiment = comparison_suite_to_json(cfg);
    echo_experiment["trials"] = trials;
    report = run_comparison_suite(d, trials, seed, cfg);
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "' (expected removability, catenoid or comparison)");
  }

  const fs::path out = prepare_out_dir(global.out_dir);
  write_text(out / "config.json",
             dump_canonical({{"density", density_to_json(d)}, {"seed", seed}, {"experiment", echo_experiment}}));
  write_report(report, out / "report.json");

  for (const Check& check : report.checks) {
    console << (check.passed ? "PASS  " : "FAIL  ") << check.name;
    if (!check.detail.empty()) {
      console << "  (" << check.detail << ")";
    }
    console << '\n';
  }
  if (!report.complete) {
    console << "report incomplete: at least one solve did not converge\n";
    return kNonConvergence;
  }
  return report.all_passed() ? kOk : kDomainViolation;
}

void check_thread_env() {
  if (const char* env = std::getenv("LINGROWTH_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
      throw ConfigError(std::string("LINGROWTH_THREADS must be a positive integer, got '") + env + "'");
    }
  }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  GlobalFlags global;
  DensityFlags dflags;
  CatenoidFlags cflags;
  SolveFlags sflags;
  ExperimentFlags eflags;

  CLI::App app{"Linear-growth variational problems: densities, generalized catenoids, Dirichlet solves and "
               "removability experiments"};
  app.name("lingrowth");
  app.require_subcommand(1);
  app.add_option("--config", global.config_path, "JSON config file; flags override its values");
  app.add_option("--out", global.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", global.seed, "Seed for randomized experiments");
  app.add_flag("--quiet", global.quiet, "Suppress the summary on stdout");

  auto add_density_flags = [&](CLI::App* sub) {
    sub->add_option("--density", dflags.kind, "Density family: area or mu");
    sub->add_option("--mu", dflags.mu, "Exponent of the mu family (> 1)");
  };

  CLI::App* density = app.add_subcommand("density", "Validate a density and classify its growth");
  density->add_option("--kind", dflags.kind, "Density family: area or mu");
  density->add_option("--mu", dflags.mu, "Exponent of the mu family (> 1)");

  CLI::App* catenoid = app.add_subcommand("catenoid", "Tabulate a generalized catenoid profile");
  add_density_flags(catenoid);
  catenoid->add_option("--sign", cflags.sign, "plus or minus");
  catenoid->add_option("--alpha", cflags.alpha, "Flux parameter alpha > 0");
  catenoid->add_option("--a", cflags.a, "Offset a");
  catenoid->add_option("--n", cflags.n, "Dimension n >= 2");
  catenoid->add_option("--convention", cflags.convention, "Anchor of the offset: neck or unit");
  catenoid->add_option("--rho-min", cflags.rho_min, "Smallest radius (must exceed the neck radius)");
  catenoid->add_option("--rho-max", cflags.rho_max, "Largest radius");
  catenoid->add_option("--samples", cflags.samples, "Number of rows");

  CLI::App* solve = app.add_subcommand("solve", "Single Dirichlet solve on a polar mesh");
  add_density_flags(solve);
  solve->add_option("--r-in", sflags.r_in, "Inner radius (0 for the disk)");
  solve->add_option("--r-out", sflags.r_out, "Outer radius");
  solve->add_option("--n-r", sflags.n_r, "Radial intervals");
  solve->add_option("--n-theta", sflags.n_theta, "Angular intervals");
  solve->add_option("--boundary", sflags.boundary, "Boundary data: affine or catenoid");
  solve->add_option("--slope", sflags.slope, "Affine slope (two numbers)")->expected(2);
  solve->add_option("--c", sflags.c, "Affine constant");
  solve->add_option("--max-iter", sflags.max_iter, "Newton iteration cap");
  solve->add_option("--grad-tol", sflags.grad_tol, "Relative gradient tolerance");

  CLI::App* experiment = app.add_subcommand("experiment", "Run an experiment sweep and write its report");
  add_density_flags(experiment);
  experiment->add_option("--kind", eflags.kind, "removability, catenoid or comparison");
  experiment->add_option("--trials", eflags.trials, "Comparison suite trials");
  experiment->add_option("--refinements", eflags.refinements, "Catenoid reproduction levels");
  experiment->add_option("--spike", eflags.spike, "Removability inner corruption");
  experiment->add_option("--epsilons", eflags.epsilons, "Removability inner radii");

  for (CLI::App* sub : {density, catenoid, solve, experiment}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  Console console(out, global.quiet);
  try {
    check_thread_env();
    json root = load_config(global.config_path);
    if (global.seed) {
      root["seed"] = *global.seed;
    }
    for (auto it = root.begin(); it != root.end(); ++it) {
      static const std::vector<std::string> known{"density", "seed", "catenoid", "solve", "experiment"};
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        throw ConfigError("config: unknown top-level key '" + it.key() + "'");
      }
    }
    if (root.contains("seed") && !root["seed"].is_number_unsigned()) {
      throw ConfigError("config: seed must be a non-negative integer");
    }

    if (density->parsed()) {
      return cmd_density(root, global, dflags, console);
    }
    if (catenoid->parsed()) {
      return cmd_catenoid(root, global, dflags, cflags, console);
    }
    if (solve->parsed()) {
      return cmd_solve(root, global, dflags, sflags, console);
    }
    return cmd_experiment(root, global, dflags, eflags, console);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainViolation;
  } catch (const UndeterminedLimitError& e) {
    err << "hypothesis error: " << e.what() << '\n';
    return kDomainViolation;
  } catch (const NonConvergenceError& e) {
    err << "non-convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const AccuracyError& e) {
    err << "accuracy not reached: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

} // namespace lingrowth::cli
