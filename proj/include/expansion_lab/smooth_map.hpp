#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "expansion_lab/domain.hpp"
#include "expansion_lab/errors.hpp"

namespace xlab {

using json = nlohmann::json;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Hölder data of x -> log|f'(x)|: |log|f'(x)| - log|f'(y)|| <= constant * d(x,y)^alpha for d < epsilon.
struct HolderData {
  double alpha = 1.0;
  double constant = 0.0;
  double epsilon = 0.25;
};

/// A concrete closed form or spline behind a SmoothMap1D.
///
/// Circle models expose a lift F: R -> R with F(x+1) = F(x) + degree. Interval models are
/// evaluated on [0,1] only.
class MapModel {
 public:
  virtual ~MapModel() = default;

  virtual double lift(double x) const = 0;
  virtual double derivative(double x) const = 0;

  /// F(x+u) - F(x). Models override this when they can keep full relative accuracy in u.
  virtual double increment(double x, double u) const { return lift(x + u) - lift(x); }

  /// {"family": name, "params": {...}} or {"spline": {...}}.
  virtual json describe() const = 0;
};

/// A C^{1+alpha} local diffeomorphism of the circle or the unit interval.
///
/// Value type: cheap to copy, immutable, safe to share between threads.
class SmoothMap1D {
 public:
  SmoothMap1D(std::shared_ptr<const MapModel> model, Domain domain, HolderData holder);

  Domain domain() const { return domain_; }
  const HolderData& holder() const { return holder_; }

  /// f(x), canonicalized into the domain.
  double operator()(double x) const { return domain_.canonical(model_->lift(x)); }
  double lift(double x) const { return model_->lift(x); }
  double derivative(double x) const { return model_->derivative(x); }
  double increment(double x, double u) const { return model_->increment(x, u); }

  /// +1 if the lift is increasing, -1 if decreasing.
  int orientation() const { return orientation_; }
  /// Signed degree of the circle covering; +-1 for interval maps.
  int degree() const { return degree_; }
  std::size_t branch_count() const { return static_cast<std::size_t>(degree_ < 0 ? -degree_ : degree_); }

  /// The preimage of y on branch `branch`, branches ordered by increasing preimage in [0,1).
  double inverse_branch(double y, std::size_t branch) const;

  json to_json() const;

 private:
  std::shared_ptr<const MapModel> model_;
  Domain domain_;
  HolderData holder_;
  int orientation_ = 1;
  int degree_ = 1;
};

// ---------------------------------------------------------------------------
// Closed-form families

/// F(x) = k x + shift + eps sin(2 pi x) / (2 pi) on the circle. Covers doubling (k=2),
/// rotations (k=1, eps=0) and the perturbed doubling family.
class CircleSineModel final : public MapModel {
 public:
  CircleSineModel(int degree, double shift, double eps, std::string family = "circle_sine", json params = nullptr);

  double lift(double x) const override;
  double derivative(double x) const override;
  double increment(double x, double u) const override;
  json describe() const override;

  /// Exact Lipschitz constant of log|F'|: |eps| 2 pi / (|k| - |eps|).
  double log_derivative_lipschitz() const;

 private:
  int degree_;
  double shift_;
  double eps_;
  std::string family_;
  json params_;
};

/// f(x) = s x / (1 + (s-1) x): an increasing diffeomorphism of [0,1] fixing 0 and 1 with f'(0)=s, f'(1)=1/s.
class MobiusModel final : public MapModel {
 public:
  explicit MobiusModel(double s, std::string family = "mobius");

  double lift(double x) const override;
  double derivative(double x) const override;
  double increment(double x, double u) const override;
  json describe() const override;

  /// Exact Lipschitz constant of log f': 2|s-1| / min(1, s).
  double log_derivative_lipschitz() const;

 private:
  double s_;
  std::string family_;
};

/// Monotone cubic Hermite spline through (knots, values) with prescribed knot derivatives.
///
/// Knots run from 0 to 1. On the circle, values.back() - values.front() is the integer degree and the
/// lift is extended periodically. The derivative is exact for the spline, never finite-differenced.
class SplineModel final : public MapModel {
 public:
  SplineModel(Domain domain, std::vector<double> knots, std::vector<double> values, std::vector<double> derivs);

  double lift(double x) const override;
  double derivative(double x) const override;
  double increment(double x, double u) const override;
  json describe() const override;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& derivs() const { return derivs_; }

  /// Minimum of |p'| over every segment (closed form on each quadratic).
  double min_abs_derivative() const;

 private:
  struct Segment {
    double x0, h;
    double c0, c1, c2, c3;  // p(s) = c0 + c1 s + c2 s^2 + c3 s^3, s = x - x0
  };

  std::size_t segment_index(double y) const;
  // F(x1) - F(x0) for x0 <= x1 on the real line (periodically extended on the circle).
  double delta(double x0, double x1) const;

  Domain domain_;
  std::vector<double> knots_, values_, derivs_;
  std::vector<Segment> segments_;
  double period_shift_ = 0.0;
};

// ---------------------------------------------------------------------------
// Numerics shared by the pullback and inverse-branch code

/// Safeguarded Newton for a monotone residual with a sign change on [lo, hi] (bisection fallback).
/// Converges to a bracket of a few ulps.
template <class Residual, class Slope>
double solve_monotone(Residual&& residual, Slope&& slope, double lo, double hi) {
  double rlo = residual(lo);
  double rhi = residual(hi);
  if (rlo == 0.0) return lo;
  if (rhi == 0.0) return hi;
  if ((rlo > 0.0) == (rhi > 0.0)) throw ParameterError("solve_monotone: root not bracketed");
  const bool increasing = rhi > 0.0;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if ((r > 0.0) == increasing) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = slope(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - r / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(std::fabs(lo), std::fabs(hi));
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
        std::fabs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(x), 1e-300)) {
      return next;
    }
    x = next;
  }
  return x;
}

/// Grid estimate of the Hölder constant of log|f'| at scales eps/100 .. eps, inflated by 1.25.
double estimate_holder_constant(const SmoothMap1D& map, double alpha, double epsilon, std::size_t grid = 1u << 14);

/// Grid checks of the SmoothMap1D invariants; throws InvariantViolation naming the failed one.
void validate_map(const SmoothMap1D& map);

}  // namespace xlab
