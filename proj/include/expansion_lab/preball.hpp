#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "expansion_lab/system.hpp"

namespace xlab {

/// An interval given by offsets relative to the preball's base point: [x + lo, x + hi].
struct OffsetInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// A (delta, lambda)-hyperbolic preball V of order n around x: f^n maps V onto the ball of
/// radius delta around f^n(x), contracting backwards at rate lambda.
///
/// V is stored as the base point plus left/right extents so that arcs wrapping through 0 on the
/// circle have no endpoint-order ambiguity. `left_extents[i]`, `right_extents[i]` describe f^i(V)
/// around the orbit point x_i.
struct Preball {
  GeneratorSystem system;
  Word word;
  std::size_t order = 0;
  double x = 0.0;
  std::vector<double> orbit;  // x_0 .. x_n
  std::vector<double> log_derivs;
  std::vector<double> left_extents, right_extents;
  double delta = 0.0;
  double lambda = 0.5;
  double distortion_K = 1.0;
  HolderData holder;
  bool certified = false;  // order verified as a lambda-hyperbolic time

  double left() const { return left_extents.front(); }
  double right() const { return right_extents.front(); }
  double image_center() const { return orbit.back(); }
  double image_left() const { return left_extents.back(); }
  double image_right() const { return right_extents.back(); }
  double diameter() const { return left() + right(); }
  /// Endpoints of V in the domain (the left one may wrap through 0 on the circle).
  std::pair<double, double> endpoints() const;

  /// f^i(x + u) - x_i, tracked in offsets for full relative accuracy. Returns v_0..v_n.
  std::vector<double> offset_trajectory(double u) const;
};

struct PreballOptions {
  double sigma = 0.5;      // lambda of the preball
  bool strict = true;      // require a certified sigma-hyperbolic time
  double inflation = 0.0;  // margin added to log theta when certifying (emulates phi)
};

/// Pulls back the ball of radius delta around f^n(x) along the inverse branches selected by the orbit.
/// Throws PreconditionError (strict, non-hyperbolic n) or ReduceDeltaError (pullback not injective).
Preball build_preball(const GeneratorSystem& system, const Word& word, double x, std::size_t n, double delta,
                      const PreballOptions& options = {});

/// exp(C1 delta^alpha / (1 - lambda^alpha)).
double distortion_constant(double C1, double alpha, double delta, double lambda);

struct ContractionReport {
  std::size_t samples = 0;
  std::size_t pairs = 0;
  double max_margin = 0.0;  // max of d(f^i y, f^i z) - lambda^{n-i} d(f^n y, f^n z)
  std::size_t worst_step = 0;
  std::vector<double> max_ratio_by_step;  // max d_i / (lambda^{n-i} d_n) at each i
  bool pass = true;
};

inline constexpr double kContractionSlack = 1e-10;

ContractionReport verify_contraction(const Preball& pb, std::size_t samples);

struct RegularityRecord {
  double R = 0.0, r = 0.0, ratio = 1.0;
  double birkhoff_phi = 0.0;  // S_n phi = sum of -log|f'| along the orbit
  double lower_bound = 0.0, upper_bound = 0.0;
  double L_bound = 1.0;  // K^2
  bool pass_lower = true, pass_upper = true, pass_ratio = true;
  bool pass = true;
};

struct DistortionReport {
  double K_bound = 1.0;
  double max_observed_ratio = 0.0;
  std::size_t pairs_checked = 0;
  std::size_t skipped = 0;
  bool pass = true;
  RegularityRecord regularity;
};

/// Checks m(f^n A)/m(f^n B) <= K m(A)/m(B) for each pair; zero-length B is skipped.
DistortionReport check_bounded_distortion(const Preball& pb,
                                          const std::vector<std::pair<OffsetInterval, OffsetInterval>>& pairs);

RegularityRecord check_regularity(const Preball& pb);

/// Uniform pullback radius: the largest delta <= epsilon such that every generator is injective on
/// every ball of radius delta * sup theta (2^12 grid of centres), halved.
double uniform_preball_radius(const GeneratorSystem& system);

json to_json(const Preball& pb);
json to_json(const ContractionReport& r);
json to_json(const RegularityRecord& r);
json to_json(const DistortionReport& r);

}  // namespace xlab
