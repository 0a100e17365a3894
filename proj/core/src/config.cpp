#include "lingrowth/config.hpp"

#include "lingrowth/errors.hpp"

#include <set>

namespace lingrowth {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) {
    throw ConfigError(std::string("config: ") + what + " must be a JSON object");
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + what);
    }
  }
}

MeshResolution resolution_from_json(const json& j, MeshResolution fallback) {
  require_object(j, "mesh resolution");
  reject_unknown_keys(j, {"n_r", "n_theta", "inner_spacing"}, "mesh resolution");
  MeshResolution r{get_or(j, "n_r", fallback.n_r), get_or(j, "n_theta", fallback.n_theta),
                   get_or(j, "inner_spacing", fallback.inner_spacing)};
  if (!(r.inner_spacing >= 0.0)) {
    throw ConfigError("mesh resolution: inner_spacing must be non-negative");
  }
  return r;
}

json resolution_to_json(const MeshResolution& r) {
  return {{"n_r", r.n_r}, {"n_theta", r.n_theta}, {"inner_spacing", r.inner_spacing}};
}

} // namespace

Density density_from_json(const json& j) {
  require_object(j, "density");
  reject_unknown_keys(j, {"kind", "mu"}, "density");
  const auto kind = get_or<std::string>(j, "kind", "");
  if (kind == "area") {
    return make_area_density();
  }
  if (kind == "mu") {
    if (!j.contains("mu")) {
      throw ConfigError("config: mu density needs a 'mu' value");
    }
    return make_mu_density(get_or(j, "mu", 0.0));
  }
  throw ConfigError("config: unknown density kind '" + kind + "' (expected area or mu)");
}

json density_to_json(const Density& d) {
  switch (d.kind()) {
  case DensityKind::Area:
    return {{"kind", "area"}};
  case DensityKind::Mu:
    return {{"kind", "mu"}, {"mu", *d.mu()}};
  case DensityKind::Custom:
    break;
  }
  return {{"kind", "custom"}, {"label", d.label()}};
}

CatenoidSpec catenoid_from_json(const json& j) {
  require_object(j, "catenoid");
  reject_unknown_keys(j, {"sign", "alpha", "a", "n", "convention"}, "catenoid");
  CatenoidSpec spec;
  const auto sign = get_or<std::string>(j, "sign", "plus");
  if (sign == "plus") {
    spec.sign = Sign::Plus;
  } else if (sign == "minus") {
    spec.sign = Sign::Minus;
  } else {
    throw ConfigError("config: catenoid sign must be plus or minus");
  }
  spec.alpha = get_or(j, "alpha", spec.alpha);
  spec.offset = get_or(j, "a", spec.offset);
  spec.dim = get_or(j, "n", spec.dim);
  const auto convention = get_or<std::string>(j, "convention", "neck");
  if (convention == "neck") {
    spec.anchor = Anchor::Neck;
  } else if (convention == "unit") {
    spec.anchor = Anchor::Unit;
  } else {
    throw ConfigError("config: catenoid convention must be neck or unit");
  }
  spec.check();
  return spec;
}

json catenoid_to_json(const CatenoidSpec& spec) {
  return {{"sign", to_string(spec.sign)},
          {"alpha", spec.alpha},
          {"a", spec.offset},
          {"n", spec.dim},
          {"convention", to_string(spec.anchor)}};
}

SolverOptions solver_options_from_json(const json& j) {
  require_object(j, "solver");
  reject_unknown_keys(j, {"max_iter", "grad_tol", "armijo_c", "armijo_factor"}, "solver");
  SolverOptions opts;
  opts.max_iter = get_or(j, "max_iter", opts.max_iter);
  opts.grad_tol = get_or(j, "grad_tol", opts.grad_tol);
  opts.armijo_c = get_or(j, "armijo_c", opts.armijo_c);
  opts.armijo_factor = get_or(j, "armijo_factor", opts.armijo_factor);
  if (opts.max_iter < 0 || !(opts.grad_tol > 0.0) || !(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) ||
      !(opts.armijo_factor > 0.0 && opts.armijo_factor < 1.0)) {
    throw ConfigError("config: solver options out of range");
  }
  return opts;
}

json solver_options_to_json(const SolverOptions& opts) {
  return {{"max_iter", opts.max_iter},
          {"grad_tol", opts.grad_tol},
          {"armijo_c", opts.armijo_c},
          {"armijo_factor", opts.armijo_factor}};
}

json validation_to_json(const ValidationReport& report) {
  const auto& b = report.linear_growth_bounds;
  return {{"linear_growth_bounds", {{"a_est", b.a_est}, {"b_est", b.b_est}, {"A_est", b.A_est}, {"B_est", b.B_est}}},
          {"linear_growth_ok", report.linear_growth_ok},
          {"derivative_consistency", report.derivative_consistency},
          {"convexity_ok", report.convexity_ok},
          {"origin_ok", report.origin_ok}};
}

json diagnostics_to_json(const DiscreteSolution& sol) {
  return {{"energy", sol.energy},
          {"grad_norm", sol.grad_norm},
          {"iterations", sol.iterations},
          {"converged", sol.converged}};
}

OuterData outer_data_from_json(const json& j) {
  require_object(j, "outer data");
  reject_unknown_keys(j, {"kind", "slope", "c", "catenoid", "values"}, "outer data");
  OuterData data;
  const auto kind = get_or<std::string>(j, "kind", "affine");
  if (kind == "affine") {
    data.kind = OuterData::Kind::Affine;
    const auto slope = get_or(j, "slope", std::vector<double>{data.slope.x(), data.slope.y()});
    if (slope.size() != 2) {
      throw ConfigError("config: affine slope must have two components");
    }
    data.slope = {slope[0], slope[1]};
    data.constant = get_or(j, "c", 0.0);
  } else if (kind == "radial") {
    data.kind = OuterData::Kind::Radial;
    data.radial = catenoid_from_json(j.value("catenoid", json::object()));
  } else if (kind == "samples") {
    data.kind = OuterData::Kind::Samples;
    data.samples = get_or(j, "values", std::vector<double>{});
    if (data.samples.empty()) {
      throw ConfigError("config: sampled outer data needs a non-empty 'values' list");
    }
  } else {
    throw ConfigError("config: unknown outer data kind '" + kind + "'");
  }
  return data;
}

json outer_data_to_json(const OuterData& data) {
  switch (data.kind) {
  case OuterData::Kind::Affine:
    return {{"kind", "affine"}, {"slope", {data.slope.x(), data.slope.y()}}, {"c", data.constant}};
  case OuterData::Kind::Radial:
    return {{"kind", "radial"}, {"catenoid", catenoid_to_json(data.radial)}};
  case OuterData::Kind::Samples:
    return {{"kind", "samples"}, {"values", data.samples}};
  }
  return json::object();
}

RemovabilityConfig removability_from_json(const json& j) {
  require_object(j, "removability");
  reject_unknown_keys(j,
                      {"kind", "outer_radius", "probe_radius", "epsilons", "spike", "outer", "reference_mesh",
                       "annulus_mesh", "annulus_mesh_per_epsilon", "solver"},
                      "removability");
  RemovabilityConfig cfg;
  cfg.outer_radius = get_or(j, "outer_radius", cfg.outer_radius);
  cfg.probe_radius = get_or(j, "probe_radius", 0.5 * cfg.outer_radius);
  cfg.epsilons = get_or(j, "epsilons", cfg.epsilons);
  cfg.spike = get_or(j, "spike", cfg.spike);
  if (j.contains("outer")) {
    cfg.outer = outer_data_from_json(j.at("outer"));
  }
  if (j.contains("reference_mesh")) {
    cfg.reference_mesh = resolution_from_json(j.at("reference_mesh"), cfg.reference_mesh);
  }
  if (j.contains("annulus_mesh")) {
    cfg.annulus_mesh = resolution_from_json(j.at("annulus_mesh"), cfg.annulus_mesh);
  }
  if (j.contains("annulus_mesh_per_epsilon")) {
    for (const json& r : j.at("annulus_mesh_per_epsilon")) {
      cfg.annulus_mesh_per_epsilon.push_back(resolution_from_json(r, cfg.annulus_mesh));
    }
  }
  if (j.contains("solver")) {
    cfg.solver = solver_options_from_json(j.at("solver"));
  }
  cfg.check();
  return cfg;
}

json removability_to_json(const RemovabilityConfig& cfg) {
  json per_eps = json::array();
  for (const auto& r : cfg.annulus_mesh_per_epsilon) {
    per_eps.push_back(resolution_to_json(r));
  }
  return {{"kind", "removability"},
          {"outer_radius", cfg.outer_radius},
          {"probe_radius", cfg.probe_radius},
          {"epsilons", cfg.epsilons},
          {"spike", cfg.spike},
          {"outer", outer_data_to_json(cfg.outer)},
          {"reference_mesh", resolution_to_json(cfg.reference_mesh)},
          {"annulus_mesh", resolution_to_json(cfg.annulus_mesh)},
          {"annulus_mesh_per_epsilon", per_eps},
          {"solver", solver_options_to_json(cfg.solver)}};
}

CatenoidReproductionConfig catenoid_reproduction_from_json(const json& j) {
  require_object(j, "catenoid reproduction");
  reject_unknown_keys(j,
                      {"kind", "catenoid", "r_in", "r_out", "base_n_r", "base_n_theta", "refinements",
                       "min_order", "solver"},
                      "catenoid reproduction");
  CatenoidReproductionConfig cfg;
  if (j.contains("catenoid")) {
    cfg.spec = catenoid_from_json(j.at("catenoid"));
  }
  cfg.r_in = get_or(j, "r_in", cfg.r_in);
  cfg.r_out = get_or(j, "r_out", cfg.r_out);
  cfg.base_n_r = get_or(j, "base_n_r", cfg.base_n_r);
  cfg.base_n_theta = get_or(j, "base_n_theta", cfg.base_n_theta);
  cfg.min_order = get_or(j, "min_order", cfg.min_order);
  if (j.contains("solver")) {
    cfg.solver = solver_options_from_json(j.at("solver"));
  }
  if (!(cfg.r_out > cfg.r_in)) {
    throw ConfigError("config: catenoid reproduction needs r_out > r_in");
  }
  return cfg;
}

json catenoid_reproduction_to_json(const CatenoidReproductionConfig& cfg) {
  return {{"kind", "catenoid"},
          {"catenoid", catenoid_to_json(cfg.spec)},
          {"r_in", cfg.r_in},
          {"r_out", cfg.r_out},
          {"base_n_r", cfg.base_n_r},
          {"base_n_theta", cfg.base_n_theta},
          {"min_order", cfg.min_order},
          {"solver", solver_options_to_json(cfg.solver)}};
}

ComparisonSuiteConfig comparison_suite_from_json(const json& j) {
  require_object(j, "comparison suite");
  reject_unknown_keys(j, {"kind", "r_in", "r_out", "n_r", "n_theta", "fourier_degree", "trials", "solver"},
                      "comparison suite");
  ComparisonSuiteConfig cfg;
  cfg.r_in = get_or(j, "r_in", cfg.r_in);
  cfg.r_out = get_or(j, "r_out", cfg.r_out);
  cfg.n_r = get_or(j, "n_r", cfg.n_r);
  cfg.n_theta = get_or(j, "n_theta", cfg.n_theta);
  cfg.fourier_degree = get_or(j, "fourier_degree", cfg.fourier_degree);
  if (j.contains("solver")) {
    cfg.solver = solver_options_from_json(j.at("solver"));
  }
  if (cfg.fourier_degree < 0) {
    throw ConfigError("config: fourier_degree must be non-negative");
  }
  return cfg;
}

json comparison_suite_to_json(const ComparisonSuiteConfig& cfg) {
  return {{"kind", "comparison"},
          {"r_in", cfg.r_in},
          {"r_out", cfg.r_out},
          {"n_r", cfg.n_r},
          {"n_theta", cfg.n_theta},
          {"fourier_degree", cfg.fourier_degree},
          {"solver", solver_options_to_json(cfg.solver)}};
}

} // namespace lingrowth
