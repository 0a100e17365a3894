#pragma once

#include "lingrowth/density.hpp"
#include "lingrowth/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lingrowth {

enum class InitialGuess {
  Harmonic, // linearization at zero gradient: D^2 G(0) = g''(0) I
  Zero,     // interior values set to zero
};

struct SolverOptions {
  int max_iter = 200;
  double grad_tol = 1e-10; // relative to 1 + |energy|
  double armijo_c = 1e-4;
  double armijo_factor = 0.5;
  double stall_tol = 1e-14; // relative energy decrement treated as stagnation
  InitialGuess initial_guess = InitialGuess::Harmonic;
};

/// Dirichlet values keyed by boundary node index.
using BoundaryData = std::map<int, double>;

struct DiscreteSolution {
  std::shared_ptr<const PolarMesh> mesh;
  std::vector<double> values;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Energy after every accepted step, starting with the initial guess.
  std::vector<double> energy_history;
};

/// Thrown when the iteration cap is hit; carries the last iterate.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, DiscreteSolution last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const DiscreteSolution& diagnostics() const noexcept { return last_; }

private:
  DiscreteSolution last_;
};

/// f evaluated at every boundary node.
BoundaryData sample_boundary(const PolarMesh& mesh, const std::function<double(const Point&)>& f);

/// Sum over triangles of area * g(|grad u|) for the piecewise-affine u.
double energy(const Density& d, const PolarMesh& mesh, const std::vector<double>& u);

/// Gradient of the discrete energy with respect to every nodal value
/// (boundary entries included).
std::vector<double> energy_gradient(const Density& d, const PolarMesh& mesh,
                                    const std::vector<double>& u);

/// Minimizes the discrete energy over the interior values by damped Newton
/// with Armijo backtracking. Throws NonConvergenceError at the iteration cap,
/// ConfigError when boundary data is missing or the energy is not finite.
DiscreteSolution solve_dirichlet(const Density& d, std::shared_ptr<const PolarMesh> mesh,
                                 const BoundaryData& boundary, const SolverOptions& opts = {});

/// Euclidean norm of the energy gradient over interior nodes: the discrete
/// weak Euler-Lagrange residual.
double residual_EL(const Density& d, const PolarMesh& mesh, const DiscreteSolution& sol);
double residual_EL(const Density& d, const DiscreteSolution& sol);

enum class ComparisonStatus { Holds, Violated, NotApplicable };

std::string to_string(ComparisonStatus status);

struct ComparisonResult {
  ComparisonStatus status = ComparisonStatus::NotApplicable;
  bool holds = false;
  /// max(0, max over interior nodes of u - v - M).
  double max_violation = 0.0;
  /// max(0, max over boundary nodes of u - v - M); positive means the
  /// hypothesis u <= v + M on the boundary failed.
  double boundary_excess = 0.0;
};

/// Discrete comparison principle: if u <= v + M on the boundary (within tol),
/// checks u <= v + M at interior nodes. The default tolerance is 1e-8 (1 + |M|).
/// Throws ConfigError when u and v live on different meshes.
ComparisonResult check_comparison(const DiscreteSolution& u, const DiscreteSolution& v, double M);
ComparisonResult check_comparison(const DiscreteSolution& u, const DiscreteSolution& v, double M,
                                  double tol);

/// CSV with header node,x,y,value.
void write_solution_csv(const DiscreteSolution& sol, std::ostream& out);

} // namespace lingrowth
