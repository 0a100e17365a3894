#include "lingrowth/density.hpp"

#include "lingrowth/errors.hpp"
#include "lingrowth/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lingrowth {

std::string to_string(DensityKind kind) {
  switch (kind) {
  case DensityKind::Area:
    return "area";
  case DensityKind::Mu:
    return "mu";
  case DensityKind::Custom:
    return "custom";
  }
  return "unknown";
}

std::string to_string(Growth growth) {
  switch (growth) {
  case Growth::FiniteIntegral:
    return "FiniteIntegral";
  case Growth::InfiniteIntegral:
    return "InfiniteIntegral";
  case Growth::Undetermined:
    return "Undetermined";
  }
  return "unknown";
}

Density Density::custom(Evaluator eval, CustomOptions opts) {
  Density d;
  d.kind_ = DensityKind::Custom;
  d.label_ = std::move(opts.label);
  d.eval_ = std::move(eval);
  d.inverse_ = std::move(opts.analytic_inverse);
  d.gprime_inf_ = opts.gprime_inf;
  d.decay_ = opts.decay;
  d.growth_ = classify_growth_numerically(d);
  return d;
}

Density make_area_density() {
  Density d;
  d.kind_ = DensityKind::Area;
  d.label_ = "area";
  d.eval_ = [](double t) {
    const double s = std::hypot(1.0, t);
    return DensityValues{s, t / s, 1.0 / (s * s * s)};
  };
  d.inverse_ = [](double y) { return y / std::sqrt((1.0 - y) * (1.0 + y)); };
  d.gprime_inf_ = 1.0;
  // max over t of ((1+t)^2 / (1+t^2))^(3/2) is attained at t = 1.
  d.decay_ = DecayBound{2.0 * std::sqrt(2.0), 3.0};
  d.growth_ = Growth::FiniteIntegral;
  return d;
}

Density make_mu_density(double mu) {
  if (!(mu > 1.0) || !std::isfinite(mu)) {
    std::ostringstream msg;
    msg << "mu-density requires mu > 1 (got " << mu << "): g' would be unbounded";
    throw ConfigError(msg.str());
  }
  Density d;
  d.kind_ = DensityKind::Mu;
  d.mu_ = mu;
  std::ostringstream label;
  label << "mu=" << mu;
  d.label_ = label.str();
  d.eval_ = [mu](double t) {
    const double l = std::log1p(t);
    DensityValues v;
    v.dg = -std::expm1((1.0 - mu) * l);
    v.d2g = (mu - 1.0) * std::exp(-mu * l);
    if (mu == 2.0) {
      v.g = t - l;
    } else {
      v.g = t - std::expm1((2.0 - mu) * l) / (2.0 - mu);
    }
    return v;
  };
  d.inverse_ = [mu](double y) { return std::expm1(-std::log1p(-y) / (mu - 1.0)); };
  d.gprime_inf_ = 1.0;
  d.decay_ = DecayBound{mu - 1.0, mu};
  d.growth_ = mu > 2.0 ? Growth::FiniteIntegral : Growth::InfiniteIntegral;
  return d;
}

namespace {

constexpr double kFdStep = 1e-5;

// Second-order difference of f at t >= 0; one-sided near the origin so that
// densities are never evaluated at negative arguments.
template <typename F>
double second_order_difference(F&& f, double t) {
  const double h = kFdStep;
  if (t >= h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
  }
  return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
}

} // namespace

ValidationReport validate(const Density& d, const std::vector<double>& samples) {
  if (samples.empty()) {
    throw ConfigError("validate: sample set is empty");
  }
  if (!std::is_sorted(samples.begin(), samples.end()) ||
      std::adjacent_find(samples.begin(), samples.end()) != samples.end()) {
    throw ConfigError("validate: samples must be strictly increasing");
  }
  if (samples.front() != 0.0) {
    throw ConfigError("validate: samples must start at t = 0");
  }

  ValidationReport report;
  std::vector<DensityValues> values;
  values.reserve(samples.size());
  for (double t : samples) {
    values.push_back(d.eval(t));
  }

  report.origin_ok = std::abs(values.front().dg) <= 1e-12;

  report.convexity_ok = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(values[i].d2g > 0.0)) {
      report.convexity_ok = false;
    }
    if (i > 0 && !(values[i].dg > values[i - 1].dg)) {
      report.convexity_ok = false;
    }
    if (d.gprime_inf() && !(values[i].dg < *d.gprime_inf())) {
      report.convexity_ok = false;
    }
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = samples[i];
    const double fd1 = second_order_difference([&](double s) { return d.g(s); }, t);
    const double fd2 = second_order_difference([&](double s) { return d.gprime(s); }, t);
    worst = std::max(worst, std::abs(fd1 - values[i].dg) / std::max(1.0, std::abs(values[i].dg)));
    worst = std::max(worst, std::abs(fd2 - values[i].d2g) / std::max(1.0, std::abs(values[i].d2g)));
  }
  report.derivative_consistency = worst;

  // Supporting line at the largest sample from below (convexity), chord-free
  // majorant with the largest sampled slope from above.
  LinearGrowthBounds& b = report.linear_growth_bounds;
  b.a_est = values.back().dg;
  b.A_est = 0.0;
  for (const auto& v : values) {
    b.A_est = std::max(b.A_est, v.dg);
  }
  b.b_est = 0.0;
  b.B_est = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    b.b_est = std::max(b.b_est, b.a_est * samples[i] - values[i].g);
    b.B_est = std::max(b.B_est, values[i].g - b.A_est * samples[i]);
  }
  bool holds = b.a_est > 0.0 && b.A_est > 0.0;
  for (std::size_t i = 0; i < samples.size() && holds; ++i) {
    const double t = samples[i];
    const double slack = 1e-12 * std::max(1.0, std::abs(values[i].g));
    holds = b.a_est * t - b.b_est <= values[i].g + slack && values[i].g <= b.A_est * t + b.B_est + slack;
  }
  // Constants fitted to finitely many samples always exist; also require g'
  // to level off, i.e. its increments over the last two decades must shrink.
  const double t_max = samples.back();
  if (holds && t_max >= 100.0) {
    const double rise_last = d.gprime(t_max) - d.gprime(t_max / 10.0);
    const double rise_prev = d.gprime(t_max / 10.0) - d.gprime(t_max / 100.0);
    holds = rise_last <= 0.5 * rise_prev || rise_last <= 1e-9 * std::abs(d.gprime(t_max));
  }
  report.linear_growth_ok = holds;
  return report;
}

Density normalize(const Density& d) {
  double limit = 0.0;
  if (d.gprime_inf()) {
    limit = *d.gprime_inf();
  } else {
    const double x1 = d.gprime(1e3);
    const double x2 = d.gprime(1e4);
    const double x3 = d.gprime(1e5);
    const double d1 = x2 - x1;
    const double d2 = x3 - x2;
    if (std::abs(d2) > 1e-6 * std::max(1.0, std::abs(x3)) ||
        std::abs(d1) > 1e-6 * std::max(1.0, std::abs(x2)) || !std::isfinite(x3)) {
      std::ostringstream msg;
      msg << "normalize: g'(1e3), g'(1e4), g'(1e5) = " << x1 << ", " << x2 << ", " << x3
          << " do not agree to 1e-6";
      throw UndeterminedLimitError(msg.str());
    }
    limit = x3;
    // Aitken extrapolation when the differences shrink geometrically.
    const double denom = d2 - d1;
    if (denom != 0.0 && std::abs(d2) < std::abs(d1)) {
      limit = x3 - d2 * d2 / denom;
    }
  }
  if (!(limit > 0.0) || !std::isfinite(limit)) {
    throw UndeterminedLimitError("normalize: limit of g' must be finite and positive");
  }
  if (limit == 1.0) {
    return d;
  }

  Density out = d;
  const double s = limit;
  auto inner = d.eval_;
  out.eval_ = [inner, s](double t) {
    DensityValues v = inner(t);
    return DensityValues{v.g / s, v.dg / s, v.d2g / s};
  };
  if (d.inverse_) {
    auto inv = d.inverse_;
    out.inverse_ = [inv, s](double y) { return inv(y * s); };
  }
  if (d.decay_) {
    out.decay_ = DecayBound{d.decay_->c / s, d.decay_->mu};
  }
  out.gprime_inf_ = 1.0;
  return out;
}

double invert_gprime(const Density& d, double y) {
  const double limit = d.gprime_inf().value_or(1.0);
  if (!(y >= 0.0) || !(y < limit)) {
    std::ostringstream msg;
    msg << "invert_gprime: y = " << y << " outside [0, " << limit << ")";
    throw DomainError(msg.str());
  }
  if (y == 0.0) {
    return 0.0;
  }
  if (d.has_analytic_inverse()) {
    return d.analytic_inverse(y);
  }

  auto f = [&](double t) { return d.gprime(t) - y; };
  double lo = 0.0;
  double flo = f(lo);
  double hi = 1.0;
  double fhi = f(hi);
  while (fhi < 0.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    if (hi > 1e300) {
      throw DomainError("invert_gprime: no bracket found (y too close to the limit of g')");
    }
    fhi = f(hi);
  }
  if (fhi == 0.0) {
    return hi;
  }

  // Illinois variant of regula falsi with a bisection safeguard.
  int side = 0;
  for (int iter = 0; iter < 400; ++iter) {
    double t = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(t > lo && t < hi)) {
      t = 0.5 * (lo + hi);
    }
    const double ft = f(t);
    if (ft == 0.0) {
      return t;
    }
    if (ft < 0.0) {
      lo = t;
      flo = ft;
      if (side == -1) {
        fhi *= 0.5;
      }
      side = -1;
    } else {
      hi = t;
      fhi = ft;
      if (side == 1) {
        flo *= 0.5;
      }
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
  }
  const double t = 0.5 * (lo + hi);
  return t;
}

Growth classify_growth_numerically(const Density& d) {
  // Increments of I(T) = int_0^T t g''(t) dt over the decades [1e2, 1e5],
  // integrated in the logarithmic variable t = e^w.
  auto integrand = [&](double w) {
    const double t = std::exp(w);
    return t * t * d.gsecond(t);
  };
  quad::Options opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-10;
  double increments[3];
  for (int k = 0; k < 3; ++k) {
    const double lo = std::log(std::pow(10.0, 2 + k));
    const double hi = std::log(std::pow(10.0, 3 + k));
    increments[k] = quad::gauss_kronrod(integrand, lo, hi, opts).value;
  }
  if (!(increments[0] > 0.0) || !(increments[1] > 0.0)) {
    return Growth::Undetermined;
  }
  const double r1 = increments[1] / increments[0];
  const double r2 = increments[2] / increments[1];
  if (r1 < 0.5 && r2 < 0.5) {
    return Growth::FiniteIntegral;
  }
  if (r1 >= 0.9 && r2 >= 0.9) {
    return Growth::InfiniteIntegral;
  }
  return Growth::Undetermined;
}

Growth classify_growth(const Density& d) {
  if (d.kind() == DensityKind::Custom) {
    return d.growth();
  }
  if (d.kind() == DensityKind::Mu) {
    return *d.mu() > 2.0 ? Growth::FiniteIntegral : Growth::InfiniteIntegral;
  }
  return Growth::FiniteIntegral;
}

} // namespace lingrowth
