#pragma once

#include <functional>

namespace lingrowth::quad {

struct Result {
  double value = 0.0;
  double error = 0.0; // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Subdivides the panel with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol*|value|). b < a is allowed and
/// flips the sign.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const Options& opts = {});

/// Single 15-point Kronrod panel; `error` is |K15 - G7|.
Result gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b);

} // namespace lingrowth::quad
