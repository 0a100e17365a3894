#pragma once

#include "lingrowth/catenoid.hpp"
#include "lingrowth/density.hpp"
#include "lingrowth/experiments.hpp"
#include "lingrowth/solver.hpp"

#include <nlohmann/json.hpp>

namespace lingrowth {

// JSON schema shared by the CLI and the experiment drivers. Parsers throw
// ConfigError on malformed input.

/// {"kind": "area"} or {"kind": "mu", "mu": 3.0}
Density density_from_json(const nlohmann::json& j);
nlohmann::json density_to_json(const Density& d);

/// {"sign": "plus"|"minus", "alpha", "a", "n", "convention": "neck"|"unit"}
CatenoidSpec catenoid_from_json(const nlohmann::json& j);
nlohmann::json catenoid_to_json(const CatenoidSpec& spec);

/// {"max_iter", "grad_tol", "armijo_c", "armijo_factor"}; missing keys keep defaults.
SolverOptions solver_options_from_json(const nlohmann::json& j);
nlohmann::json solver_options_to_json(const SolverOptions& opts);

nlohmann::json validation_to_json(const ValidationReport& report);

/// {energy, grad_norm, iterations, converged}
nlohmann::json diagnostics_to_json(const DiscreteSolution& sol);

OuterData outer_data_from_json(const nlohmann::json& j);
nlohmann::json outer_data_to_json(const OuterData& data);

RemovabilityConfig removability_from_json(const nlohmann::json& j);
nlohmann::json removability_to_json(const RemovabilityConfig& cfg);

CatenoidReproductionConfig catenoid_reproduction_from_json(const nlohmann::json& j);
nlohmann::json catenoid_reproduction_to_json(const CatenoidReproductionConfig& cfg);

ComparisonSuiteConfig comparison_suite_from_json(const nlohmann::json& j);
nlohmann::json comparison_suite_to_json(const ComparisonSuiteConfig& cfg);

} // namespace lingrowth
