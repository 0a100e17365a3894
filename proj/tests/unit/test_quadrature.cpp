#include "lingrowth/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lingrowth;

TEST_CASE("polynomials up to degree 22 are exact on one panel") {
  for (int k = 0; k <= 22; ++k) {
    const auto r = quad::gauss_kronrod_panel([k](double x) { return std::pow(x, k); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("smooth integrands converge to the requested tolerance") {
  const auto r = quad::gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0) < 1e-12);

  const auto e = quad::gauss_kronrod([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
  CHECK(std::abs(e.value - std::sqrt(std::numbers::pi)) < 1e-10);
}

TEST_CASE("integrable endpoint singularity") {
  const auto r = quad::gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0) < 1e-9);
  CHECK(r.intervals > 1);
}

TEST_CASE("reversed limits flip the sign") {
  auto f = [](double x) { return x * x; };
  const auto forward = quad::gauss_kronrod(f, 0.0, 3.0);
  const auto backward = quad::gauss_kronrod(f, 3.0, 0.0);
  CHECK(forward.value == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(backward.value == doctest::Approx(-9.0).epsilon(1e-14));
}

TEST_CASE("empty interval") {
  const auto r = quad::gauss_kronrod([](double x) { return x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
  CHECK(r.converged);
}

TEST_CASE("interval budget exhaustion is reported, not hidden") {
  quad::Options opts;
  opts.max_intervals = 3;
  opts.abs_tol = 1e-15;
  const auto r = quad::gauss_kronrod([](double x) { return std::sin(1.0 / x); }, 1e-3, 1.0, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.error > 1e-15);
}

TEST_CASE("relative tolerance") {
  quad::Options opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  const auto r = quad::gauss_kronrod([](double x) { return 1e8 * std::cos(x); }, 0.0, 1.0, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.value / (1e8 * std::sin(1.0)) - 1.0) < 1e-12);
}
