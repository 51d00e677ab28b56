#include "expansion_lab/smooth_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// SmoothMap1D

SmoothMap1D::SmoothMap1D(std::shared_ptr<const MapModel> model, Domain domain, HolderData holder)
    : model_(std::move(model)), domain_(domain), holder_(holder) {
  if (!model_) throw ParameterError("SmoothMap1D: null model");
  if (!(holder_.alpha > 0.0 && holder_.alpha <= 1.0)) throw ParameterError("holder alpha must lie in (0,1]");
  if (!(holder_.constant >= 0.0) || !std::isfinite(holder_.constant))
    throw ParameterError("holder constant must be finite and >= 0");
  if (!(holder_.epsilon > 0.0)) throw ParameterError("locality scale epsilon must be > 0");

  const double d0 = model_->derivative(0.0);
  if (!(std::fabs(d0) > 0.0) || !std::isfinite(d0))
    throw InvariantViolation("local_diffeomorphism", "f'(0) = " + fmt(d0));
  orientation_ = d0 > 0.0 ? 1 : -1;
  if (domain_.is_circle()) {
    const double span = model_->lift(1.0) - model_->lift(0.0);
    const double rounded = std::round(span);
    if (std::fabs(span - rounded) > 1e-9 || rounded == 0.0)
      throw InvariantViolation("circle_degree", "lift(1) - lift(0) = " + fmt(span) + " is not a nonzero integer");
    degree_ = static_cast<int>(rounded);
    if ((degree_ > 0) != (orientation_ > 0))
      throw InvariantViolation("local_diffeomorphism", "degree sign disagrees with derivative sign");
  } else {
    degree_ = orientation_;
  }
}

double SmoothMap1D::inverse_branch(double y, std::size_t branch) const {
  if (branch >= branch_count())
    throw ParameterError("inverse_branch: branch " + std::to_string(branch) + " out of range");
  const double f0 = model_->lift(0.0);
  const double f1 = model_->lift(1.0);
  auto deriv = [&](double x) { return model_->derivative(x); };
  if (!domain_.is_circle()) {
    const double lo = std::min(f0, f1), hi = std::max(f0, f1);
    if (y < lo || y > hi)
      throw ParameterError("inverse_branch: " + fmt(y) + " is outside the image [" + fmt(lo) + ", " + fmt(hi) + "]");
    return solve_monotone([&](double x) { return model_->lift(x) - y; }, deriv, 0.0, 1.0);
  }
  // Preimages of y solve F(x) = y + m with y + m in the half-open image of [0,1).
  y = domain_.canonical(y);
  const double lo = std::min(f0, f1);
  const std::size_t count = branch_count();
  double m0 = std::ceil(lo - y);
  std::vector<double> roots;
  roots.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double target = y + m0 + static_cast<double>(j);
    double x = solve_monotone([&](double x) { return model_->lift(x) - target; }, deriv, 0.0, 1.0);
    roots.push_back(x >= 1.0 ? 0.0 : x);
  }
  std::sort(roots.begin(), roots.end());
  return roots[branch];
}

json SmoothMap1D::to_json() const {
  json j = model_->describe();
  j["alpha"] = holder_.alpha;
  j["holder_const"] = holder_.constant;
  j["epsilon"] = holder_.epsilon;
  return j;
}

// ---------------------------------------------------------------------------
// CircleSineModel

CircleSineModel::CircleSineModel(int degree, double shift, double eps, std::string family, json params)
    : degree_(degree), shift_(shift), eps_(eps), family_(std::move(family)), params_(std::move(params)) {
  if (degree_ == 0) throw ParameterError("circle_sine: degree must be nonzero");
  if (!(std::fabs(eps_) < std::abs(degree_)))
    throw ParameterError("circle_sine: |eps| must be < |degree| for a local diffeomorphism");
  if (params_.is_null()) params_ = json{{"degree", degree_}, {"shift", shift_}, {"eps", eps_}};
}

double CircleSineModel::lift(double x) const {
  return degree_ * x + shift_ + eps_ * std::sin(kTwoPi * x) / kTwoPi;
}

double CircleSineModel::derivative(double x) const { return degree_ + eps_ * std::cos(kTwoPi * x); }

double CircleSineModel::increment(double x, double u) const {
  // sin(a+b) - sin(a) = 2 cos(a + b/2) sin(b/2)
  const double pi = 0.5 * kTwoPi;
  return degree_ * u + eps_ / pi * std::cos(kTwoPi * x + pi * u) * std::sin(pi * u);
}

json CircleSineModel::describe() const { return json{{"family", family_}, {"params", params_}}; }

double CircleSineModel::log_derivative_lipschitz() const {
  return std::fabs(eps_) * kTwoPi / (std::abs(degree_) - std::fabs(eps_));
}

// ---------------------------------------------------------------------------
// MobiusModel

MobiusModel::MobiusModel(double s, std::string family) : s_(s), family_(std::move(family)) {
  if (!(s_ > 0.0) || !std::isfinite(s_)) throw ParameterError("mobius: s must be > 0");
}

double MobiusModel::lift(double x) const { return s_ * x / (1.0 + (s_ - 1.0) * x); }

double MobiusModel::derivative(double x) const {
  const double q = 1.0 + (s_ - 1.0) * x;
  return s_ / (q * q);
}

double MobiusModel::increment(double x, double u) const {
  return s_ * u / ((1.0 + (s_ - 1.0) * (x + u)) * (1.0 + (s_ - 1.0) * x));
}

json MobiusModel::describe() const {
  if (family_ == "identity") return json{{"family", "identity"}, {"params", json::object()}};
  return json{{"family", family_}, {"params", {{"s", s_}}}};
}

double MobiusModel::log_derivative_lipschitz() const { return 2.0 * std::fabs(s_ - 1.0) / std::min(1.0, s_); }

// ---------------------------------------------------------------------------
// SplineModel

SplineModel::SplineModel(Domain domain, std::vector<double> knots, std::vector<double> values,
                         std::vector<double> derivs)
    : domain_(domain), knots_(std::move(knots)), values_(std::move(values)), derivs_(std::move(derivs)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values_.size() != n || derivs_.size() != n)
    throw InvariantViolation("spline_shape", "knots, values and derivs must have equal length >= 2");
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    throw InvariantViolation("spline_shape", "knots must start at 0 and end at 1");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(knots_[i + 1] > knots_[i])) throw InvariantViolation("spline_shape", "knots must be strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvariantViolation("spline_shape", "non-finite value");
  for (double d : derivs_)
    if (!std::isfinite(d) || d == 0.0)
      throw InvariantViolation("local_diffeomorphism", "knot derivative is zero or non-finite");
  if (domain_.is_circle()) {
    period_shift_ = values_.back() - values_.front();
    if (std::fabs(derivs_.front() - derivs_.back()) > 1e-12)
      throw InvariantViolation("spline_shape", "circle spline derivative must be periodic");
  } else {
    for (double v : values_)
      if (v < -1e-15 || v > 1.0 + 1e-15) throw InvariantViolation("spline_shape", "interval spline leaves [0,1]");
  }

  segments_.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = knots_[i + 1] - knots_[i];
    const double slope = (values_[i + 1] - values_[i]) / h;
    const double d0 = derivs_[i], d1 = derivs_[i + 1];
    segments_.push_back({knots_[i], h, values_[i], d0, (3.0 * slope - 2.0 * d0 - d1) / h,
                         (d0 + d1 - 2.0 * slope) / (h * h)});
  }
  const double m = min_abs_derivative();
  if (!(m > 0.0)) throw InvariantViolation("local_diffeomorphism", "spline derivative vanishes (critical point)");
  for (const auto& s : segments_) {
    const double a = s.c1, b = s.c1 + 2.0 * s.c2 * s.h + 3.0 * s.c3 * s.h * s.h;
    if ((a > 0.0) != (derivs_.front() > 0.0) || (b > 0.0) != (derivs_.front() > 0.0))
      throw InvariantViolation("local_diffeomorphism", "spline is not monotone");
  }
}

double SplineModel::min_abs_derivative() const {
  double best = std::numeric_limits<double>::infinity();
  const double sign = derivs_.front() > 0.0 ? 1.0 : -1.0;
  for (const auto& s : segments_) {
    auto dp = [&](double t) { return sign * (s.c1 + 2.0 * s.c2 * t + 3.0 * s.c3 * t * t); };
    double m = std::min(dp(0.0), dp(s.h));
    if (s.c3 != 0.0) {
      const double t = -s.c2 / (3.0 * s.c3);
      if (t > 0.0 && t < s.h) m = std::min(m, dp(t));
    }
    best = std::min(best, m);
  }
  return best;
}

std::size_t SplineModel::segment_index(double y) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, segments_.size() - 1);
}

double SplineModel::lift(double x) const {
  double cell = 0.0, y = x;
  if (domain_.is_circle()) {
    cell = std::floor(x);
    y = x - cell;
  } else if (x < 0.0 || x > 1.0) {
    throw ParameterError("spline: interval map evaluated outside [0,1] at " + fmt(x));
  }
  const std::size_t i = segment_index(y);
  const auto& s = segments_[i];
  if (y == knots_[i + 1]) return values_[i + 1] + cell * period_shift_;
  const double t = y - s.x0;
  return s.c0 + t * (s.c1 + t * (s.c2 + t * s.c3)) + cell * period_shift_;
}

double SplineModel::derivative(double x) const {
  double y = x;
  if (domain_.is_circle()) {
    y = x - std::floor(x);
  } else if (x < 0.0 || x > 1.0) {
    throw ParameterError("spline: interval map evaluated outside [0,1] at " + fmt(x));
  }
  const std::size_t i = segment_index(y);
  if (y == knots_[i + 1]) return derivs_[i + 1];
  const auto& s = segments_[i];
  const double t = y - s.x0;
  return s.c1 + t * (2.0 * s.c2 + 3.0 * s.c3 * t);
}

double SplineModel::delta(double x0, double x1) const {
  double total = 0.0;
  double a = x0;
  int guard = 0;
  while (a < x1) {
    if (++guard > 1 << 20) throw ParameterError("spline: increment span too large");
    const double cell = domain_.is_circle() ? std::floor(a) : 0.0;
    const double y = a - cell;
    const std::size_t i = segment_index(y);
    const auto& s = segments_[i];
    const double seg_end = cell + knots_[i + 1];
    const double b = std::min(x1, seg_end);
    const double sa = y - s.x0;
    const double sb = sa + (b - a);
    total += (b - a) * (s.c1 + s.c2 * (sa + sb) + s.c3 * (sa * sa + sa * sb + sb * sb));
    if (b <= a) break;
    a = b;
  }
  return total;
}

double SplineModel::increment(double x, double u) const {
  if (!domain_.is_circle() && (x < 0.0 || x > 1.0 || x + u < -1e-15 || x + u > 1.0 + 1e-15))
    throw ParameterError("spline: interval increment leaves [0,1]");
  return u >= 0.0 ? delta(x, x + u) : -delta(x + u, x);
}

json SplineModel::describe() const {
  return json{{"spline", {{"knots", knots_}, {"values", values_}, {"derivs", derivs_}}}};
}

// ---------------------------------------------------------------------------
// Validation helpers

double estimate_holder_constant(const SmoothMap1D& map, double alpha, double epsilon, std::size_t grid) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("estimate_holder_constant: alpha must lie in (0,1]");
  if (!(epsilon > 0.0)) throw ParameterError("estimate_holder_constant: epsilon must be > 0");
  const Domain dom = map.domain();
  constexpr int kScales = 12;
  double best = 0.0;
  for (int k = 0; k < kScales; ++k) {
    // Geometric ladder from eps/100 up to (just below) eps.
    const double h = epsilon * std::pow(100.0, -1.0 + static_cast<double>(k) / (kScales - 1)) * (1.0 - 1e-9);
    for (std::size_t j = 0; j < grid; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(grid);
      double y = x + h;
      if (!dom.is_circle() && y > 1.0) continue;
      const double diff = std::fabs(std::log(std::fabs(map.derivative(x))) - std::log(std::fabs(map.derivative(y))));
      best = std::max(best, diff / std::pow(dom.offset_length(h), alpha));
    }
  }
  return 1.25 * best;
}

void validate_map(const SmoothMap1D& map) {
  const Domain dom = map.domain();
  constexpr std::size_t kGrid = 1u << 14;
  double max_log_deriv = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= kGrid; ++j) {
    const double x = static_cast<double>(j) / kGrid;
    if (dom.is_circle() && j == kGrid) break;
    const double d = map.derivative(x);
    if (!std::isfinite(d) || std::fabs(d) < 1e-300)
      throw InvariantViolation("local_diffeomorphism", "|f'(" + fmt(x) + ")| = " + fmt(std::fabs(d)));
    if ((d > 0.0 ? 1 : -1) != map.orientation())
      throw InvariantViolation("local_diffeomorphism", "f' changes sign near x = " + fmt(x));
    max_log_deriv = std::max(max_log_deriv, std::log(std::fabs(d)));
  }
  if (!std::isfinite(max_log_deriv))
    throw InvariantViolation("bounded_log_inverse_lipschitz", "sup -log theta is not finite");

  const HolderData& h = map.holder();
  constexpr std::size_t kPairGrid = 1u << 12;
  for (int k = 0; k < 6; ++k) {
    const double step = h.epsilon * std::pow(0.25, k) * 0.999;
    for (std::size_t j = 0; j < kPairGrid; ++j) {
      const double x = static_cast<double>(j) / kPairGrid;
      const double y = x + step;
      if (!dom.is_circle() && y > 1.0) continue;
      const double lhs =
          std::fabs(std::log(std::fabs(map.derivative(x))) - std::log(std::fabs(map.derivative(y))));
      const double rhs = h.constant * std::pow(dom.offset_length(step), h.alpha);
      if (lhs > rhs * (1.0 + 1e-9) + 1e-12)
        throw InvariantViolation("holder_bound", "|log|f'(x)| - log|f'(y)|| = " + fmt(lhs) + " exceeds " +
                                                     fmt(rhs) + " at x = " + fmt(x) + ", d = " + fmt(step));
    }
  }

  for (std::size_t b = 0; b < map.branch_count(); ++b) {
    for (int j = 0; j < 16; ++j) {
      double y = (j + 0.37) / 16.0;
      if (!dom.is_circle()) {
        const double lo = std::min(map.lift(0.0), map.lift(1.0)), hi = std::max(map.lift(0.0), map.lift(1.0));
        y = lo + (hi - lo) * y;
      }
      const double x = map.inverse_branch(y, b);
      if (dom.distance(map(x), y) > 1e-12)
        throw InvariantViolation("inverse_branch", "f(inverse_branch(" + fmt(y) + ")) misses by " +
                                                       fmt(dom.distance(map(x), y)));
    }
  }
}

}  // namespace xlab
