#pragma once

#include "lingrowth/density.hpp"

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace lingrowth {

enum class Sign { Plus, Minus };

/// Lower limit of the defining integral of a catenoid profile.
/// Neck: integrate from the neck radius alpha^(1/(n-1)), so the profile equals
/// the offset at the neck (only finite when the density has FiniteIntegral growth).
/// Unit: integrate from radius 1, so the profile equals the offset on the unit
/// sphere; requires 0 < alpha < 1 and works for both growth classes.
enum class Anchor { Neck, Unit };

std::string to_string(Sign sign);
std::string to_string(Anchor anchor);

/// Radial barrier rho -> offset +/- int_anchor^rho (g')^{-1}(alpha / r^(n-1)) dr.
struct CatenoidSpec {
  Sign sign = Sign::Plus;
  double alpha = 1.0; // flux constant: rho^(n-1) g'(|slope|) == alpha
  double offset = 0.0;
  int dim = 2;
  Anchor anchor = Anchor::Neck;

  double neck_radius() const { return std::pow(alpha, 1.0 / (dim - 1)); }
  double sign_factor() const { return sign == Sign::Plus ? 1.0 : -1.0; }

  /// Throws ConfigError on alpha <= 0, dim < 2, or Unit anchor with alpha >= 1.
  void check() const;
};

/// Returned in place of a value when the profile is unbounded (the integral
/// diverges at the neck). Carries the sign of the blow-up.
inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

inline bool is_divergent(double value) { return std::isinf(value); }

struct RadialSample {
  double rho = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

struct RadialProfile {
  CatenoidSpec spec;
  std::vector<RadialSample> samples;
  double neck_radius = 0.0;
  bool neck_finite = false;
};

/// int_lo^hi (g')^{-1}(alpha / r^(n-1)) dr for neck <= lo <= hi. Panels within
/// 10% of the neck radius are evaluated in the substituted variable s with
/// r^(n-1) = alpha / g'(s); lo == neck is the improper integral and returns
/// kDivergent when it diverges.
double radial_integral(const Density& d, double alpha, int dim, double lo, double hi);

/// Profile value by direct quadrature in r, switching to the substituted form
/// near the neck. Throws DomainError for rho <= neck radius and AccuracyError if
/// the quadrature does not reach 1e-10.
double profile_value(const Density& d, const CatenoidSpec& spec, double rho);

/// The same value computed entirely in the substituted variable s. Accepts
/// rho == neck radius as the one-sided limit; returns +/-kDivergent where the
/// profile blows up.
double profile_value_substituted(const Density& d, const CatenoidSpec& spec, double rho);

/// sign * (g')^{-1}(alpha / rho^(n-1)).
double profile_slope(const Density& d, const CatenoidSpec& spec, double rho);

/// Samples on [rho_min, rho_max] with rho - neck geometrically spaced, so that
/// points accumulate at the neck.
RadialProfile make_profile(const Density& d, const CatenoidSpec& spec, double rho_min,
                           double rho_max, int count);

/// max over samples of |rho^(n-1) g'(|slope|) - alpha|: constancy of the radial flux.
double ode_residual(const Density& d, const RadialProfile& profile);

/// Upper barrier at radius rho for a solution on B_R minus B_r bounded by M_R on
/// the outer sphere: M_R + int_rho^R (g')^{-1}(r^(n-1) / t^(n-1)) dt.
double envelope_bound(const Density& d, double r, double rho, double R, double M_R, int dim);

/// a + (R - |x|) (g')^{-1}(1/2): bound on the catenoid with flux |x|^(n-1)/2 anchored
/// on the sphere of radius R (R = 1 by default), independent of how close the
/// singularity is.
double uniform_bound_blowup_case(const Density& d, double a, double x_norm, double R = 1.0);

/// CSV with header rho,value,slope; divergent values are written as inf/-inf.
void write_profile_csv(const RadialProfile& profile, std::ostream& out);

} // namespace lingrowth
