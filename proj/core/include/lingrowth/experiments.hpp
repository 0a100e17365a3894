#pragma once

#include "lingrowth/catenoid.hpp"
#include "lingrowth/density.hpp"
#include "lingrowth/mesh.hpp"
#include "lingrowth/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lingrowth {

/// Dirichlet data on the outer circle of a removability sweep.
struct OuterData {
  enum class Kind { Affine, Radial, Samples };

  Kind kind = Kind::Affine;
  Eigen::Vector2d slope{0.0, 0.0}; // affine: c + slope . x
  double constant = 0.0;
  CatenoidSpec radial;              // radial: profile value at the outer radius
  std::vector<double> samples;      // samples: equally spaced in angle, periodic linear interpolation

  /// Outer data as a function of position; the density is needed for radial data.
  std::function<double(const Point&)> bind(const Density& d, double outer_radius) const;
};

struct MeshResolution {
  int n_r = 32;
  int n_theta = 64;
  /// First radial spacing at the inner circle, graded up to the uniform
  /// spacing; 0 keeps all rings uniform.
  double inner_spacing = 0.0;

  PolarMesh build(double r_in, double r_out) const;
};

struct RemovabilityConfig {
  double outer_radius = 1.0;
  double probe_radius = 0.5;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  double spike = 1.0; // added to the reference values on the inner circle
  OuterData outer;
  MeshResolution reference_mesh{32, 64};
  MeshResolution annulus_mesh{32, 64, 1e-3};
  /// Optional per-epsilon override of annulus_mesh.
  std::vector<MeshResolution> annulus_mesh_per_epsilon;
  SolverOptions solver;

  /// Throws ConfigError unless every epsilon < probe < outer radius and the
  /// epsilons strictly decrease.
  void check() const;
};

struct CatenoidReproductionConfig {
  CatenoidSpec spec;
  double r_in = 1.5;
  double r_out = 3.0;
  int base_n_r = 16;
  int base_n_theta = 64;
  SolverOptions solver;
  double min_order = 1.8;
};

struct ComparisonSuiteConfig {
  double r_in = 0.5;
  double r_out = 1.0;
  int n_r = 16;
  int n_theta = 48;
  int fourier_degree = 4;
  SolverOptions solver;
};

struct EpsilonRecord {
  double epsilon = 0.0;
  double h = 0.0;
  double deviation_at_probe = 0.0;
  double envelope_value = 0.0; // E(eps) from the catenoid module
  bool envelope_satisfied = false;       // deviation <= E + 10 h^2
  bool two_sided_bound_satisfied = false; // min outer - E <= u <= max outer + E (+ 10 h^2)
  std::optional<double> uniform_bound;    // blow-up case only, at the probe radius
  std::optional<bool> uniform_bound_satisfied;
  int iterations = 0;
  bool converged = false;
};

struct RefinementRecord {
  int n_r = 0;
  int n_theta = 0;
  double h = 0.0;
  double max_error = 0.0;
  int iterations = 0;
  std::optional<double> order;
};

struct ComparisonRecord {
  std::string scenario; // "random_ordered" or "catenoid_barrier"
  int trial = 0;
  double M = 0.0;
  std::string status;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string kind; // "removability", "catenoid", "comparison"
  nlohmann::json metadata = nlohmann::json::object();
  nlohmann::json reference = nlohmann::json::object();
  std::vector<EpsilonRecord> epsilon_records;
  std::vector<RefinementRecord> refinement_records;
  std::vector<ComparisonRecord> comparison_records;
  std::vector<double> convergence_orders;
  std::vector<Check> checks;
  bool complete = true;

  bool all_passed() const;
};

/// Allowance added to continuum bounds on a mesh with radial spacing h.
inline double discretization_allowance(double h) { return 10.0 * h * h; }

/// E(eps) = int_probe^R (g')^{-1}(eps^(n-1) / t^(n-1)) dt in the plane (n = 2).
double envelope_width(const Density& d, double epsilon, double probe, double outer_radius);

/// Reference minimizer on the disk, then one annulus solve per epsilon with
/// the inner circle corrupted by `spike`; measures how far the annulus
/// solution moves at |x| >= probe.
ExperimentReport run_removability(const Density& d, const RemovabilityConfig& cfg);

/// Solves with exact catenoid data on `refinements` meshes (n_r, n_theta doubled
/// each level) and records max nodal errors and observed orders.
ExperimentReport run_catenoid_reproduction(const Density& d, const CatenoidReproductionConfig& cfg,
                                           int refinements);

/// Random ordered Fourier data pairs checked against the discrete comparison
/// principle, plus the catenoid-barrier scenario on the annulus.
ExperimentReport run_comparison_suite(const Density& d, int trials, std::uint64_t seed,
                                      const ComparisonSuiteConfig& cfg = {});

/// Parallelism for sweeps: LINGROWTH_THREADS if set (>= 1), else hardware concurrency.
int sweep_threads();

} // namespace lingrowth
