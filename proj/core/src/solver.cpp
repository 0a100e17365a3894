#include "lingrowth/solver.hpp"

#include "lingrowth/errors.hpp"
#include "lingrowth/format.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace lingrowth {

std::string to_string(ComparisonStatus status) {
  switch (status) {
  case ComparisonStatus::Holds:
    return "holds";
  case ComparisonStatus::Violated:
    return "violated";
  case ComparisonStatus::NotApplicable:
    return "not-applicable";
  }
  return "unknown";
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Per-triangle area and gradients of the three hat functions.
struct ElementGeometry {
  double area;
  std::array<Vec2, 3> grads;
};

std::vector<ElementGeometry> element_geometry(const PolarMesh& mesh) {
  std::vector<ElementGeometry> out;
  out.reserve(mesh.triangles().size());
  const auto& nodes = mesh.nodes();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    const Point& p0 = nodes[tri[0]];
    const Point& p1 = nodes[tri[1]];
    const Point& p2 = nodes[tri[2]];
    const double twice_area = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    ElementGeometry geo;
    geo.area = 0.5 * twice_area;
    // grad(phi_i) = rot90(opposite edge) / (2 area)
    geo.grads[0] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twice_area;
    geo.grads[1] = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / twice_area;
    geo.grads[2] = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / twice_area;
    out.push_back(geo);
  }
  return out;
}

Vec2 element_gradient(const ElementGeometry& geo, const Triangle& tri, const std::vector<double>& u) {
  return u[tri[0]] * geo.grads[0] + u[tri[1]] * geo.grads[1] + u[tri[2]] * geo.grads[2];
}

class DirichletProblem {
public:
  DirichletProblem(const Density& d, const PolarMesh& mesh)
      : d_(d), mesh_(mesh), geometry_(element_geometry(mesh)), dof_(mesh.num_nodes(), -1) {
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (!mesh.is_boundary(i)) {
        dof_[i] = num_dofs_++;
        interior_.push_back(i);
      }
    }
  }

  int num_dofs() const { return num_dofs_; }

  double energy(const std::vector<double>& u) const {
    // Neumaier summation keeps the last Newton decrements above rounding.
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t t = 0; t < geometry_.size(); ++t) {
      const Vec2 p = element_gradient(geometry_[t], mesh_.triangles()[t], u);
      const double term = geometry_[t].area * d_.g(p.norm());
      const double next = sum + term;
      carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
      sum = next;
    }
    return sum + carry;
  }

  // With `linearized` the flux is replaced by g''(0) grad u.
  std::vector<double> full_gradient(const std::vector<double>& u, bool linearized = false) const {
    std::vector<double> grad(u.size(), 0.0);
    const double curvature_at_zero = d_.gsecond(0.0);
    for (std::size_t t = 0; t < geometry_.size(); ++t) {
      const Triangle& tri = mesh_.triangles()[t];
      const ElementGeometry& geo = geometry_[t];
      const Vec2 p = element_gradient(geo, tri, u);
      const Vec2 flux = linearized ? Vec2(curvature_at_zero * p) : dG(d_, p);
      for (int k = 0; k < 3; ++k) {
        grad[tri[k]] += geo.area * flux.dot(geo.grads[k]);
      }
    }
    return grad;
  }

  Eigen::VectorXd interior_gradient(const std::vector<double>& u, bool linearized = false) const {
    const std::vector<double> full = full_gradient(u, linearized);
    Eigen::VectorXd g(num_dofs_);
    for (int k = 0; k < num_dofs_; ++k) {
      g[k] = full[interior_[k]];
    }
    return g;
  }

  // Interior block of the Hessian. With `linearized` the density Hessian is
  // replaced by its value at zero gradient, g''(0) I.
  SparseMatrix hessian(const std::vector<double>& u, bool linearized) const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(geometry_.size() * 9);
    const Mat2 at_zero = d_.gsecond(0.0) * Mat2::Identity();
    for (std::size_t t = 0; t < geometry_.size(); ++t) {
      const Triangle& tri = mesh_.triangles()[t];
      const ElementGeometry& geo = geometry_[t];
      const Mat2 h = linearized ? at_zero : hessian_G(d_, element_gradient(geo, tri, u));
      for (int k = 0; k < 3; ++k) {
        const int row = dof_[tri[k]];
        if (row < 0) {
          continue;
        }
        const Vec2 hk = h * geo.grads[k];
        for (int l = 0; l < 3; ++l) {
          const int col = dof_[tri[l]];
          if (col >= 0) {
            triplets.emplace_back(row, col, geo.area * hk.dot(geo.grads[l]));
          }
        }
      }
    }
    SparseMatrix m(num_dofs_, num_dofs_);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
  }

  void add_to_interior(std::vector<double>& u, const Eigen::VectorXd& step, double scale) const {
    for (int k = 0; k < num_dofs_; ++k) {
      u[interior_[k]] += scale * step[k];
    }
  }

private:
  const Density& d_;
  const PolarMesh& mesh_;
  std::vector<ElementGeometry> geometry_;
  std::vector<int> dof_;
  std::vector<int> interior_;
  int num_dofs_ = 0;
};

} // namespace

BoundaryData sample_boundary(const PolarMesh& mesh, const std::function<double(const Point&)>& f) {
  BoundaryData data;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.is_boundary(i)) {
      data[i] = f(mesh.nodes()[i]);
    }
  }
  return data;
}

double energy(const Density& d, const PolarMesh& mesh, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != mesh.num_nodes()) {
    throw ConfigError("energy: one value per mesh node required");
  }
  return DirichletProblem(d, mesh).energy(u);
}

std::vector<double> energy_gradient(const Density& d, const PolarMesh& mesh,
                                    const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != mesh.num_nodes()) {
    throw ConfigError("energy_gradient: one value per mesh node required");
  }
  return DirichletProblem(d, mesh).full_gradient(u);
}

DiscreteSolution solve_dirichlet(const Density& d, std::shared_ptr<const PolarMesh> mesh,
                                 const BoundaryData& boundary, const SolverOptions& opts) {
  if (!mesh) {
    throw ConfigError("solve_dirichlet: null mesh");
  }
  const PolarMesh& m = *mesh;
  DirichletProblem problem(d, m);

  DiscreteSolution sol;
  sol.mesh = mesh;
  sol.values.assign(m.num_nodes(), 0.0);
  for (int i = 0; i < m.num_nodes(); ++i) {
    if (!m.is_boundary(i)) {
      continue;
    }
    const auto it = boundary.find(i);
    if (it == boundary.end()) {
      std::ostringstream msg;
      msg << "solve_dirichlet: no boundary value for node " << i;
      throw ConfigError(msg.str());
    }
    if (!std::isfinite(it->second)) {
      throw ConfigError("solve_dirichlet: non-finite boundary value");
    }
    sol.values[i] = it->second;
  }

  Eigen::SimplicialLDLT<SparseMatrix> factor;
  if (problem.num_dofs() > 0 && opts.initial_guess == InitialGuess::Harmonic) {
    // u_I = -K_II^{-1} K_IB u_B, read off as one Newton step of the
    // linearized energy from u_I = 0.
    const SparseMatrix k = problem.hessian(sol.values, true);
    factor.compute(k);
    const Eigen::VectorXd rhs = problem.interior_gradient(sol.values, true);
    const Eigen::VectorXd step = factor.solve(rhs);
    problem.add_to_interior(sol.values, step, -1.0);
  }

  double e = problem.energy(sol.values);
  if (!std::isfinite(e)) {
    throw ConfigError("solve_dirichlet: energy is not finite for the given data");
  }
  sol.energy_history.push_back(e);

  bool pattern_ready = false;
  int stalls = 0;
  bool flat_step = false;
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd g = problem.interior_gradient(sol.values);
    const double previous_grad = sol.grad_norm;
    sol.grad_norm = g.norm();
    // Near the minimum the energy stops resolving progress before the
    // gradient does, so a flat step only counts if the gradient stalls too.
    if (flat_step && sol.grad_norm > 0.5 * previous_grad) {
      ++stalls;
    } else {
      stalls = 0;
    }
    sol.energy = e;
    sol.iterations = iter;
    if (sol.grad_norm <= opts.grad_tol * (1.0 + std::abs(e))) {
      sol.converged = true;
      return sol;
    }
    if (iter >= opts.max_iter || stalls >= 2) {
      break;
    }

    const SparseMatrix h = problem.hessian(sol.values, false);
    if (!pattern_ready) {
      factor.analyzePattern(h);
      pattern_ready = true;
    }
    factor.factorize(h);
    Eigen::VectorXd dir;
    if (factor.info() == Eigen::Success) {
      dir = -factor.solve(g);
    }
    if (dir.size() != g.size() || !dir.allFinite() || !(g.dot(dir) < 0.0)) {
      dir = -g;
    }

    // Armijo backtracking. Once the energy change is down at rounding level
    // the step is judged by the gradient norm instead.
    const double noise = 1e-15 * (1.0 + std::abs(e));
    const double rounding = 1e-12 * (1.0 + std::abs(e));
    auto line_search = [&](const Eigen::VectorXd& direction, double& step, double& e_new,
                           std::vector<double>& trial) {
      const double slope = g.dot(direction);
      step = 1.0;
      for (int k = 0; k < 60; ++k) {
        trial = sol.values;
        problem.add_to_interior(trial, direction, step);
        e_new = problem.energy(trial);
        if (std::isfinite(e_new) && e_new <= e + opts.armijo_c * step * slope + noise) {
          return true;
        }
        if (std::isfinite(e_new) && std::abs(e_new - e) <= rounding &&
            problem.interior_gradient(trial).norm() < 0.5 * sol.grad_norm) {
          return true;
        }
        step *= opts.armijo_factor;
      }
      return false;
    };

    double step = 0.0;
    double e_new = e;
    std::vector<double> trial;
    bool accepted = line_search(dir, step, e_new, trial);
    if (!accepted) {
      Eigen::VectorXd steepest = -g;
      accepted = line_search(steepest, step, e_new, trial);
    }
    if (!accepted) {
      break;
    }
    flat_step = e - e_new < opts.stall_tol * (1.0 + std::abs(e));
    sol.values = std::move(trial);
    e = e_new;
    sol.energy_history.push_back(e);
  }

  sol.converged = false;
  std::ostringstream msg;
  msg << "solve_dirichlet: no convergence after " << sol.iterations << " iterations (gradient norm "
      << sol.grad_norm << ", energy " << sol.energy << ")";
  throw NonConvergenceError(msg.str(), sol);
}

double residual_EL(const Density& d, const PolarMesh& mesh, const DiscreteSolution& sol) {
  if (static_cast<int>(sol.values.size()) != mesh.num_nodes()) {
    throw ConfigError("residual_EL: solution does not match mesh");
  }
  return DirichletProblem(d, mesh).interior_gradient(sol.values).norm();
}

double residual_EL(const Density& d, const DiscreteSolution& sol) {
  if (!sol.mesh) {
    throw ConfigError("residual_EL: solution has no mesh");
  }
  return residual_EL(d, *sol.mesh, sol);
}

ComparisonResult check_comparison(const DiscreteSolution& u, const DiscreteSolution& v, double M) {
  return check_comparison(u, v, M, 1e-8 * (1.0 + std::abs(M)));
}

ComparisonResult check_comparison(const DiscreteSolution& u, const DiscreteSolution& v, double M,
                                  double tol) {
  if (!u.mesh || !v.mesh || !(u.mesh == v.mesh || u.mesh->same_as(*v.mesh)) ||
      u.values.size() != v.values.size()) {
    throw ConfigError("check_comparison: solutions live on different meshes");
  }
  const PolarMesh& mesh = *u.mesh;
  ComparisonResult r;
  double boundary_excess = 0.0;
  double interior_excess = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double excess = u.values[i] - v.values[i] - M;
    if (mesh.is_boundary(i)) {
      boundary_excess = std::max(boundary_excess, excess);
    } else {
      interior_excess = std::max(interior_excess, excess);
    }
  }
  r.boundary_excess = boundary_excess;
  r.max_violation = interior_excess;
  if (boundary_excess > tol) {
    r.status = ComparisonStatus::NotApplicable;
    r.holds = false;
    return r;
  }
  r.holds = interior_excess <= tol;
  r.status = r.holds ? ComparisonStatus::Holds : ComparisonStatus::Violated;
  return r;
}

void write_solution_csv(const DiscreteSolution& sol, std::ostream& out) {
  out << "node,x,y,value\n";
  const auto& nodes = sol.mesh->nodes();
  for (std::size_t i = 0; i < sol.values.size(); ++i) {
    out << i << ',' << format_real(nodes[i].x()) << ',' << format_real(nodes[i].y()) << ','
        << format_real(sol.values[i]) << '\n';
  }
}

} // namespace lingrowth
