#include "lingrowth/catenoid.hpp"

#include "lingrowth/errors.hpp"
#include "lingrowth/format.hpp"
#include "lingrowth/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace lingrowth {

std::string to_string(Sign sign) { return sign == Sign::Plus ? "plus" : "minus"; }

std::string to_string(Anchor anchor) { return anchor == Anchor::Neck ? "neck" : "unit"; }

void CatenoidSpec::check() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("catenoid: alpha must be positive");
  }
  if (dim < 2) {
    throw ConfigError("catenoid: dimension must be at least 2");
  }
  if (anchor == Anchor::Unit && !(alpha < 1.0)) {
    throw ConfigError("catenoid: unit-anchored profiles require 0 < alpha < 1");
  }
  if (!std::isfinite(offset)) {
    throw ConfigError("catenoid: offset must be finite");
  }
}

namespace {

constexpr double kAbsTol = 1e-10;
constexpr double kNeckZone = 1.1; // substitute within 10% of the neck radius
constexpr double kTailTol = 1e-13;

void require_converged(const quad::Result& r, const char* where) {
  if (!r.converged) {
    std::ostringstream msg;
    msg << where << ": quadrature did not converge (error bound " << r.error << ")";
    throw AccuracyError(msg.str(), r.error);
  }
}

// The radial integrand and its image under r^(n-1) = alpha / g'(s).
class RadialIntegrand {
public:
  RadialIntegrand(const Density& d, double alpha, int dim)
      : d_(d), alpha_(alpha), dim_(dim), neck_(std::pow(alpha, 1.0 / (dim - 1))),
        exponent_(-static_cast<double>(dim) / (dim - 1)),
        prefactor_(neck_ / (dim - 1)) {}

  double neck() const { return neck_; }

  double in_r(double r) const { return invert_gprime(d_, alpha_ / std::pow(r, dim_ - 1)); }

  // s*(rho): the slope magnitude at radius rho.
  double s_star(double rho) const { return in_r(rho); }

  // s g''(s) g'(s)^(-n/(n-1)), times ds/dw = s for w = ln s.
  double in_log_s(double w) const {
    const double s = std::exp(w);
    const DensityValues v = d_.eval(s);
    return s * s * v.d2g * std::pow(v.dg, exponent_);
  }

  double direct(double lo, double hi) const {
    quad::Options opts;
    opts.abs_tol = kAbsTol;
    auto r = quad::gauss_kronrod([this](double x) { return in_r(x); }, lo, hi, opts);
    require_converged(r, "radial integral");
    return r.value;
  }

  // int_{rho_a}^{rho_b} for neck < rho_a <= rho_b, via s in [s*(rho_b), s*(rho_a)].
  double substituted(double rho_a, double rho_b) const {
    return substituted_s(s_star(rho_b), s_star(rho_a));
  }

  double substituted_s(double s_lo, double s_hi) const {
    if (s_lo == s_hi) {
      return 0.0;
    }
    quad::Options opts;
    opts.abs_tol = kAbsTol / prefactor_;
    auto r = quad::gauss_kronrod([this](double w) { return in_log_s(w); }, std::log(s_lo),
                                 std::log(s_hi), opts);
    require_converged(r, "substituted radial integral");
    return prefactor_ * r.value;
  }

  // int_neck^{rho_b}: the s-integral from s*(rho_b) to infinity.
  double to_neck(double rho_b) const { return tail_from(s_star(rho_b)); }

  double tail_from(double s_lo) const {
    const Growth growth = classify_growth(d_);
    if (growth == Growth::InfiniteIntegral) {
      return kDivergent;
    }
    const double S = truncation_point();
    if (std::isfinite(S)) {
      return substituted_s(s_lo, std::max(S, 2.0 * std::max(s_lo, 1.0)));
    }
    if (d_.kind() == DensityKind::Mu && d_.mu()) {
      return mu_family_tail(s_lo, *d_.mu());
    }
    throw AccuracyError("catenoid: the neck tail decays too slowly to truncate", kDivergent);
  }

private:
  // Mu family, where g'(s) = 1 - (1+s)^(1-mu). With x = 1 - alpha / r^(n-1)
  // the integrand becomes x^(-p) - 1, p = 1/(mu-1), and
  // dr = neck/(n-1) (1-x)^(-q) dx, q = n/(n-1). The x^(-p) part is the
  // series sum_k (q)_k/k! X^(k+1-p)/(k+1-p), summed for X <= 1/2.
  double mu_family_tail(double s_lo, double mu) const {
    const double p = 1.0 / (mu - 1.0);
    const double q = static_cast<double>(dim_) / (dim_ - 1);
    const double s_half = std::exp2(p) - 1.0; // g'(s_half) = 1/2
    const double x = std::exp((1.0 - mu) * std::log1p(s_lo));
    const double X = std::min(x, 0.5);

    double series = 0.0;
    double coeff = 1.0;
    for (int k = 0; k < 400; ++k) {
      const double term = coeff * std::pow(X, k + 1.0 - p) / (k + 1.0 - p);
      series += term;
      if (std::abs(term) <= 1e-17 * std::abs(series)) {
        break;
      }
      coeff *= (q + k) / (k + 1.0);
    }
    // r(X) - neck = neck ((1-X)^(-1/(n-1)) - 1)
    const double rise = neck_ * std::expm1(-std::log1p(-X) / (dim_ - 1));
    const double near = neck_ / (dim_ - 1) * series - rise;
    return x <= 0.5 ? near : near + substituted_s(s_lo, s_half);
  }

  // Upper limit S where the remaining tail is below kTailTol: with a decay
  // bound g'' <= c (1+s)^-mu (mu > 2) the tail is at most
  // g'(S)^(-n/(n-1)) c (1+S)^(2-mu) / (mu-2); otherwise stop where g'(S) >= 1 - 1e-8.
  double truncation_point() const {
    const auto decay = d_.decay();
    if (decay && decay->mu > 2.0) {
      double S = 1.0;
      for (int i = 0; i < 2000 && S < 1e150; ++i) {
        const double bound = prefactor_ * std::pow(d_.gprime(S), exponent_) * decay->c *
                             std::pow(1.0 + S, 2.0 - decay->mu) / (decay->mu - 2.0);
        if (bound <= kTailTol) {
          return S;
        }
        S *= 2.0;
      }
      return std::numeric_limits<double>::infinity();
    }
    return invert_gprime(d_, 1.0 - 1e-8);
  }

  const Density& d_;
  double alpha_;
  int dim_;
  double neck_;
  double exponent_;
  double prefactor_;
};

double integral_between(const RadialIntegrand& f, double lo, double hi) {
  const double neck = f.neck();
  const double zone = kNeckZone * neck;
  if (lo == neck) {
    if (hi <= zone) {
      return f.to_neck(hi);
    }
    const double inner = f.to_neck(zone);
    return is_divergent(inner) ? inner : inner + f.direct(zone, hi);
  }
  if (hi <= zone) {
    return f.substituted(lo, hi);
  }
  if (lo >= zone) {
    return f.direct(lo, hi);
  }
  return f.substituted(lo, zone) + f.direct(zone, hi);
}

void require_outside_neck(const CatenoidSpec& spec, double rho, bool allow_neck) {
  const double neck = spec.neck_radius();
  if (!(rho > neck) && !(allow_neck && rho == neck)) {
    std::ostringstream msg;
    msg << "catenoid: rho = " << rho << " must exceed the neck radius " << neck;
    throw DomainError(msg.str());
  }
}

} // namespace

double radial_integral(const Density& d, double alpha, int dim, double lo, double hi) {
  RadialIntegrand f(d, alpha, dim);
  if (!(lo >= f.neck()) || !(hi >= lo)) {
    std::ostringstream msg;
    msg << "radial_integral: need neck (" << f.neck() << ") <= lo <= hi, got [" << lo << ", " << hi
        << "]";
    throw DomainError(msg.str());
  }
  if (lo == hi) {
    return 0.0;
  }
  return integral_between(f, lo, hi);
}

double profile_value(const Density& d, const CatenoidSpec& spec, double rho) {
  spec.check();
  require_outside_neck(spec, rho, false);
  RadialIntegrand f(d, spec.alpha, spec.dim);

  double integral = 0.0;
  if (spec.anchor == Anchor::Neck) {
    integral = integral_between(f, f.neck(), rho);
  } else if (rho >= 1.0) {
    integral = integral_between(f, 1.0, rho);
  } else {
    integral = -integral_between(f, rho, 1.0);
  }
  return spec.offset + spec.sign_factor() * integral;
}

double profile_value_substituted(const Density& d, const CatenoidSpec& spec, double rho) {
  spec.check();
  require_outside_neck(spec, rho, true);
  RadialIntegrand f(d, spec.alpha, spec.dim);
  const bool at_neck = rho == f.neck();

  double integral = 0.0;
  if (spec.anchor == Anchor::Neck) {
    if (classify_growth(d) == Growth::InfiniteIntegral) {
      integral = kDivergent;
    } else if (!at_neck) {
      integral = f.tail_from(f.s_star(rho));
    }
  } else {
    // int_1^rho = -(int over s from s*(1) to s*(rho)).
    const double s_one = f.s_star(1.0);
    if (at_neck) {
      integral = -f.tail_from(s_one);
    } else {
      const double s_rho = f.s_star(rho);
      integral = s_rho >= s_one ? -f.substituted_s(s_one, s_rho) : f.substituted_s(s_rho, s_one);
    }
  }
  return spec.offset + spec.sign_factor() * integral;
}

double profile_slope(const Density& d, const CatenoidSpec& spec, double rho) {
  spec.check();
  require_outside_neck(spec, rho, false);
  return spec.sign_factor() * invert_gprime(d, spec.alpha / std::pow(rho, spec.dim - 1));
}

RadialProfile make_profile(const Density& d, const CatenoidSpec& spec, double rho_min,
                           double rho_max, int count) {
  spec.check();
  if (count < 2) {
    throw ConfigError("make_profile: need at least two samples");
  }
  if (!(rho_max > rho_min)) {
    throw ConfigError("make_profile: rho_max must exceed rho_min");
  }
  require_outside_neck(spec, rho_min, false);

  RadialProfile profile;
  profile.spec = spec;
  profile.neck_radius = spec.neck_radius();
  profile.neck_finite = classify_growth(d) != Growth::InfiniteIntegral;
  profile.samples.reserve(static_cast<std::size_t>(count));

  const double gap_min = rho_min - profile.neck_radius;
  const double gap_max = rho_max - profile.neck_radius;
  const double ratio = gap_max / gap_min;
  for (int i = 0; i < count; ++i) {
    double rho = profile.neck_radius + gap_min * std::pow(ratio, static_cast<double>(i) / (count - 1));
    if (i == 0) {
      rho = rho_min;
    } else if (i == count - 1) {
      rho = rho_max;
    }
    profile.samples.push_back({rho, profile_value(d, spec, rho), profile_slope(d, spec, rho)});
  }
  return profile;
}

double ode_residual(const Density& d, const RadialProfile& profile) {
  if (profile.samples.size() < 3) {
    throw ConfigError("ode_residual: profile needs at least three samples");
  }
  const CatenoidSpec& spec = profile.spec;
  double worst = 0.0;
  for (const RadialSample& s : profile.samples) {
    const double flux = std::pow(s.rho, spec.dim - 1) * d.gprime(std::abs(s.slope));
    worst = std::max(worst, std::abs(flux - spec.alpha));
  }
  return worst;
}

double envelope_bound(const Density& d, double r, double rho, double R, double M_R, int dim) {
  if (!(r > 0.0 && r < rho && rho < R)) {
    std::ostringstream msg;
    msg << "envelope_bound: need 0 < r < rho < R, got r = " << r << ", rho = " << rho
        << ", R = " << R;
    throw DomainError(msg.str());
  }
  if (dim < 2) {
    throw DomainError("envelope_bound: dimension must be at least 2");
  }
  return M_R + radial_integral(d, std::pow(r, dim - 1), dim, rho, R);
}

double uniform_bound_blowup_case(const Density& d, double a, double x_norm, double R) {
  if (!(x_norm > 0.0 && x_norm <= R)) {
    throw DomainError("uniform_bound_blowup_case: need 0 < |x| <= R");
  }
  return a + (R - x_norm) * invert_gprime(d, 0.5);
}

void write_profile_csv(const RadialProfile& profile, std::ostream& out) {
  out << "rho,value,slope\n";
  for (const RadialSample& s : profile.samples) {
    out << format_real(s.rho) << ',' << format_real(s.value) << ',' << format_real(s.slope) << '\n';
  }
}

} // namespace lingrowth
