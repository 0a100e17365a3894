#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lingrowth {

enum class DensityKind { Area, Mu, Custom };

/// Whether the integral of t*g''(t) over [0, inf) is finite. The finite case
/// gives catenoids that reach their neck at finite height; the infinite case
/// gives catenoids that blow up there.
enum class Growth { FiniteIntegral, InfiniteIntegral, Undetermined };

std::string to_string(DensityKind kind);
std::string to_string(Growth growth);

struct DensityValues {
  double g = 0.0;
  double dg = 0.0;  // g'
  double d2g = 0.0; // g''
};

/// Pointwise decay g''(t) <= c (1+t)^(-mu). Used for rigorous quadrature tails.
struct DecayBound {
  double c = 1.0;
  double mu = 3.0;
};

/// A convex density g : [0, inf) -> R of linear growth, evaluated together with
/// its first two derivatives. Immutable; copies share the underlying callables.
class Density {
public:
  using Evaluator = std::function<DensityValues(double)>;
  using Inverse = std::function<double(double)>;

  struct CustomOptions {
    std::optional<double> gprime_inf;
    Inverse analytic_inverse;
    std::optional<DecayBound> decay;
    std::string label = "custom";
  };

  /// User-supplied (g, g', g''). The growth class is computed numerically.
  static Density custom(Evaluator eval, CustomOptions opts);
  static Density custom(Evaluator eval) { return custom(std::move(eval), CustomOptions{}); }

  DensityKind kind() const noexcept { return kind_; }
  std::optional<double> mu() const noexcept { return mu_; }
  const std::string& label() const noexcept { return label_; }

  DensityValues eval(double t) const { return eval_(t); }
  double g(double t) const { return eval_(t).g; }
  double gprime(double t) const { return eval_(t).dg; }
  double gsecond(double t) const { return eval_(t).d2g; }

  /// Limit of g' at infinity when known (analytically or after normalization).
  std::optional<double> gprime_inf() const noexcept { return gprime_inf_; }

  bool has_analytic_inverse() const noexcept { return static_cast<bool>(inverse_); }
  /// Closed-form inverse of g'; only valid when has_analytic_inverse().
  double analytic_inverse(double y) const { return inverse_(y); }

  std::optional<DecayBound> decay() const noexcept { return decay_; }
  Growth growth() const noexcept { return growth_; }

private:
  Density() = default;

  friend Density make_area_density();
  friend Density make_mu_density(double mu);
  friend Density normalize(const Density& d);

  DensityKind kind_ = DensityKind::Custom;
  std::optional<double> mu_;
  std::string label_;
  Evaluator eval_;
  Inverse inverse_;
  std::optional<double> gprime_inf_;
  std::optional<DecayBound> decay_;
  Growth growth_ = Growth::Undetermined;
};

/// g(t) = sqrt(1 + t^2), the area integrand.
Density make_area_density();

/// The family g''(t) = (mu - 1)(1 + t)^(-mu), g(0) = g'(0) = 0. Throws
/// ConfigError unless mu > 1.
Density make_mu_density(double mu);

struct LinearGrowthBounds {
  double a_est = 0.0;
  double b_est = 0.0;
  double A_est = 0.0;
  double B_est = 0.0;
};

struct ValidationReport {
  LinearGrowthBounds linear_growth_bounds;
  bool linear_growth_ok = false;
  double derivative_consistency = 0.0;
  bool convexity_ok = false;
  bool origin_ok = false;

  bool all_ok() const noexcept {
    return linear_growth_ok && convexity_ok && origin_ok && derivative_consistency <= 1e-6;
  }
};

/// Checks the standing hypotheses (linear growth, strict convexity, g'(0) = 0)
/// on the given sample points. Violations are flagged in the report.
/// Throws ConfigError if samples are empty, negative, unsorted or miss t = 0.
ValidationReport validate(const Density& d, const std::vector<double>& samples);

/// Rescales g so that g' tends to 1. Uses the known limit when available,
/// otherwise extrapolates g' at t = 1e3, 1e4, 1e5 and throws
/// UndeterminedLimitError when the values disagree by more than 1e-6.
Density normalize(const Density& d);

/// The t >= 0 with g'(t) = y. Throws DomainError for y < 0 or y >= lim g'.
double invert_gprime(const Density& d, double y);

/// Analytic for built-ins; numerical (integral of t g'' up to 1e2..1e5) otherwise.
Growth classify_growth(const Density& d);

/// Numerical classification regardless of kind. Exposed so built-ins can be
/// cross-checked against their analytic class.
Growth classify_growth_numerically(const Density& d);

/// Flux DG(p) = g'(|p|) p / |p|, zero at p = 0.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>
dG(const Density& d, const Eigen::MatrixBase<Derived>& p) {
  using Vec = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
  const double t = p.norm();
  if (t == 0.0) {
    return Vec::Zero(p.rows());
  }
  return (d.gprime(t) / t) * p;
}

/// D^2 G(p) = g''(|p|) e e^T + g'(|p|)/|p| (I - e e^T) with e = p/|p|, and
/// g''(0) I at the origin.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::RowsAtCompileTime>
hessian_G(const Density& d, const Eigen::MatrixBase<Derived>& p) {
  constexpr int N = Derived::RowsAtCompileTime;
  using Mat = Eigen::Matrix<double, N, N>;
  const auto n = p.rows();
  const double t = p.norm();
  if (t == 0.0) {
    return d.gsecond(0.0) * Mat::Identity(n, n);
  }
  const DensityValues v = d.eval(t);
  const auto e = (p / t).eval();
  const Mat radial = e * e.transpose();
  return v.d2g * radial + (v.dg / t) * (Mat::Identity(n, n) - radial);
}

} // namespace lingrowth
