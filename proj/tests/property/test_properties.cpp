// Randomized invariants. Every generator is seeded, so failures reproduce.

#include "lingrowth/catenoid.hpp"
#include "lingrowth/density.hpp"
#include "lingrowth/report.hpp"
#include "lingrowth/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lingrowth;
using doctest::Approx;

namespace {

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  // Log-uniform on [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Density density() {
    if (integer(0, 3) == 0) {
      return make_area_density();
    }
    return make_mu_density(uniform(1.2, 5.0));
  }

  // Densities with an infinite integral have no finite neck value, so their
  // profiles are anchored at r = 1.
  CatenoidSpec spec(const Density& d) {
    CatenoidSpec s;
    s.alpha = log_uniform(0.1, 3.0);
    if (classify_growth(d) == Growth::InfiniteIntegral) {
      s.anchor = Anchor::Unit;
      s.alpha = log_uniform(0.05, 0.95);
    }
    s.dim = integer(2, 4);
    s.offset = uniform(-2.0, 2.0);
    s.sign = integer(0, 1) == 0 ? Sign::Plus : Sign::Minus;
    return s;
  }

  // Smooth periodic data: a low-degree trigonometric polynomial in the angle.
  std::function<double(const Point&)> fourier(int degree, double scale) {
    std::vector<double> a;
    std::vector<double> b;
    const double c0 = uniform(-scale, scale);
    for (int k = 1; k <= degree; ++k) {
      a.push_back(uniform(-scale, scale) / k);
      b.push_back(uniform(-scale, scale) / k);
    }
    return [=](const Point& x) {
      const double theta = std::atan2(x.y(), x.x());
      double v = c0;
      for (int k = 1; k <= static_cast<int>(a.size()); ++k) {
        v += x.norm() * (a[k - 1] * std::cos(k * theta) + b[k - 1] * std::sin(k * theta));
      }
      return v;
    };
  }

private:
  std::mt19937_64 rng_;
};

constexpr int kCases = 40;

std::shared_ptr<const PolarMesh> small_annulus() { return std::make_shared<const PolarMesh>(0.5, 1.0, 6, 18); }

SolverOptions tight() {
  SolverOptions opts;
  opts.grad_tol = 1e-12;
  return opts;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

} // namespace

TEST_CASE("g' is increasing and bounded by its limit") {
  Gen gen(101);
  for (int k = 0; k < kCases; ++k) {
    const Density d = gen.density();
    const double s = gen.log_uniform(1e-4, 1e4);
    const double t = s * gen.uniform(1.001, 10.0);
    CHECK(d.gprime(s) < d.gprime(t));
    CHECK(d.gprime(t) <= 1.0);
    CHECK(d.gsecond(s) > 0.0);
    CHECK(d.g(t) - d.g(s) >= d.gprime(s) * (t - s) * (1.0 - 1e-12));
  }
}

TEST_CASE("invert_gprime inverts g'") {
  Gen gen(202);
  for (int k = 0; k < kCases; ++k) {
    const Density d = gen.density();
    const double t = gen.log_uniform(1e-3, 1e3);
    CHECK(invert_gprime(d, d.gprime(t)) == Approx(t).epsilon(1e-8));
    const double y = gen.uniform(0.0, 0.999);
    CHECK(d.gprime(invert_gprime(d, y)) == Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("DG matches finite differences of G, D^2 G is symmetric positive definite") {
  Gen gen(303);
  for (int k = 0; k < kCases; ++k) {
    const Density d = gen.density();
    const Eigen::Vector2d p(gen.uniform(-5.0, 5.0), gen.uniform(-5.0, 5.0));
    const double h = 1e-6;
    const Eigen::Vector2d flux = dG(d, p);
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[i] = h;
      const double fd = (d.g((p + e).norm()) - d.g((p - e).norm())) / (2.0 * h);
      CHECK(flux[i] == Approx(fd).epsilon(1e-6));
    }
    const Eigen::Matrix2d H = hessian_G(d, p);
    CHECK(std::abs(H(0, 1) - H(1, 0)) <= 1e-15);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(H);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(eig.eigenvalues().minCoeff() == Approx(d.gsecond(p.norm())).epsilon(1e-10));
    CHECK(eig.eigenvalues().maxCoeff() == Approx(d.gprime(p.norm()) / p.norm()).epsilon(1e-10));
  }
}

TEST_CASE("catenoid profiles are monotone with constant flux") {
  Gen gen(404);
  for (int k = 0; k < kCases; ++k) {
    const Density d = gen.density();
    const CatenoidSpec s = gen.spec(d);
    const double neck = s.neck_radius();
    const double r1 = neck * gen.uniform(1.001, 3.0);
    const double r2 = r1 * gen.uniform(1.01, 3.0);
    const double sign = s.sign == Sign::Plus ? 1.0 : -1.0;
    CHECK(sign * (profile_value(d, s, r2) - profile_value(d, s, r1)) > 0.0);
    for (double r : {r1, r2}) {
      const double flux = std::pow(r, s.dim - 1) * d.gprime(std::abs(profile_slope(d, s, r)));
      CHECK(flux == Approx(s.alpha).epsilon(1e-10));
    }
  }
}

TEST_CASE("direct and substituted profiles agree on random specs") {
  Gen gen(505);
  for (int k = 0; k < kCases; ++k) {
    const Density d = gen.density();
    const CatenoidSpec s = gen.spec(d);
    const double rho = s.neck_radius() * gen.log_uniform(1.0001, 20.0);
    const double direct = profile_value(d, s, rho);
    const double substituted = profile_value_substituted(d, s, rho);
    CHECK(std::abs(direct - substituted) <= 1e-8 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("solver symmetries") {
  Gen gen(606);
  const auto mesh = small_annulus();
  for (int k = 0; k < 8; ++k) {
    const Density d = gen.density();
    const auto f = gen.fourier(3, 1.0);
    const DiscreteSolution u = solve_dirichlet(d, mesh, sample_boundary(*mesh, f), tight());
    CAPTURE(k);

    SUBCASE("rotation by whole sectors") {
      const int shift = gen.integer(1, mesh->n_theta() - 1);
      const double angle = 2.0 * std::numbers::pi * shift / mesh->n_theta();
      const auto rotated = [&](const Point& x) {
        const Point y(std::cos(angle) * x.x() - std::sin(angle) * x.y(),
                      std::sin(angle) * x.x() + std::cos(angle) * x.y());
        return f(y);
      };
      const DiscreteSolution v = solve_dirichlet(d, mesh, sample_boundary(*mesh, rotated), tight());
      double worst = 0.0;
      for (int ring = 0; ring <= mesh->n_r(); ++ring) {
        for (int j = 0; j < mesh->n_theta(); ++j) {
          worst = std::max(worst, std::abs(v.values[mesh->node_index(ring, j)] -
                                           u.values[mesh->node_index(ring, j + shift)]));
        }
      }
      CHECK(worst <= 1e-8);
    }
    SUBCASE("u -> -u") {
      const DiscreteSolution v =
          solve_dirichlet(d, mesh, sample_boundary(*mesh, [&](const Point& x) { return -f(x); }), tight());
      std::vector<double> negated = u.values;
      for (double& x : negated) {
        x = -x;
      }
      CHECK(max_abs_diff(v.values, negated) <= 1e-8);
    }
    SUBCASE("adding a constant") {
      const double c = gen.uniform(-10.0, 10.0);
      const DiscreteSolution v =
          solve_dirichlet(d, mesh, sample_boundary(*mesh, [&](const Point& x) { return f(x) + c; }), tight());
      std::vector<double> shifted = u.values;
      for (double& x : shifted) {
        x += c;
      }
      CHECK(max_abs_diff(v.values, shifted) <= 1e-8);
    }
    SUBCASE("independent of the initial guess") {
      SolverOptions opts = tight();
      opts.initial_guess = InitialGuess::Zero;
      const DiscreteSolution v = solve_dirichlet(d, mesh, sample_boundary(*mesh, f), opts);
      CHECK(max_abs_diff(v.values, u.values) <= 1e-8);
    }
    SUBCASE("minimizes energy among perturbations") {
      std::vector<double> w = u.values;
      for (int i = 0; i < mesh->num_nodes(); ++i) {
        if (!mesh->is_boundary(i)) {
          w[i] += gen.uniform(-0.05, 0.05);
        }
      }
      CHECK(energy(d, *mesh, w) >= u.energy);
    }
  }
}

TEST_CASE("random ordered pairs obey the comparison principle") {
  Gen gen(707);
  const auto mesh = small_annulus();
  for (int k = 0; k < 10; ++k) {
    const Density d = gen.density();
    const auto f = gen.fourier(3, 1.0);
    const auto bump = gen.fourier(2, 0.5);
    const double M = gen.uniform(0.0, 1.0);
    // f <= (f - M + |bump| + 0.01) + M on the boundary.
    const auto g = [&](const Point& x) { return f(x) - M + std::abs(bump(x)) + 0.01; };
    const DiscreteSolution u = solve_dirichlet(d, mesh, sample_boundary(*mesh, f), tight());
    const DiscreteSolution v = solve_dirichlet(d, mesh, sample_boundary(*mesh, g), tight());
    const ComparisonResult r = check_comparison(u, v, M, 1e-9);
    CAPTURE(k);
    CHECK(r.boundary_excess <= 0.0);
    CHECK(r.holds);
  }
}

TEST_CASE("report serialization is deterministic") {
  Gen gen(808);
  for (int k = 0; k < kCases; ++k) {
    ExperimentReport r;
    r.kind = "catenoid";
    for (int i = 0; i < gen.integer(0, 4); ++i) {
      RefinementRecord rec;
      rec.n_r = gen.integer(4, 64);
      rec.n_theta = 2 * rec.n_r;
      rec.h = gen.uniform(1e-3, 1.0);
      rec.max_error = gen.log_uniform(1e-12, 1.0);
      if (i > 0) {
        rec.order = gen.uniform(0.0, 3.0);
      }
      r.refinement_records.push_back(rec);
    }
    const std::string once = dump_canonical(to_json(r));
    CHECK(dump_canonical(to_json(report_from_json(nlohmann::json::parse(once)))) == once);
  }
}
