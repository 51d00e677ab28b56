#include "expansion_lab/preball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expansion_lab/pliss.hpp"

namespace xlab {

namespace {

constexpr double kRelTol = 1e-9;

// Solves g.increment(base, u) = target for u with the sign of target * orientation.
// `cap` bounds |u| (distance to the interval edge, or 1 on the circle).
double pull_back_offset(const SmoothMap1D& g, double base, double target, double cap, double delta) {
  if (target == 0.0) return 0.0;
  const double dir = (target > 0.0) == (g.orientation() > 0) ? 1.0 : -1.0;
  auto residual = [&](double s) { return std::fabs(g.increment(base, dir * s)) - std::fabs(target); };
  auto slope = [&](double s) { return std::fabs(g.derivative(base + dir * s)); };
  double hi = std::fabs(target) / std::fabs(g.derivative(base));
  while (residual(std::min(hi, cap)) < 0.0) {
    if (hi >= cap) {
      const double reach = std::fabs(g.increment(base, dir * cap));
      throw ReduceDeltaError("image ball leaves the range of the inverse branch", delta * 0.999 * reach / std::fabs(target));
    }
    hi *= 2.0;
  }
  hi = std::min(hi, cap);
  return dir * solve_monotone(residual, slope, 0.0, hi);
}

}  // namespace

std::pair<double, double> Preball::endpoints() const {
  const Domain dom = system.domain();
  return {dom.canonical(x - left()), dom.canonical(x + right())};
}

std::vector<double> Preball::offset_trajectory(double u) const {
  std::vector<double> v(order + 1);
  v[0] = u;
  for (std::size_t i = 0; i < order; ++i) v[i + 1] = system[word.letters[i]].increment(orbit[i], v[i]);
  return v;
}

double distortion_constant(double C1, double alpha, double delta, double lambda) {
  if (!(C1 >= 0.0)) throw ParameterError("distortion_constant: C1 must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("distortion_constant: alpha must lie in (0,1]");
  if (!(delta > 0.0)) throw ParameterError("distortion_constant: delta must be > 0");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("distortion_constant: lambda must lie in (0,1)");
  return std::exp(C1 * std::pow(delta, alpha) / (1.0 - std::pow(lambda, alpha)));
}

Preball build_preball(const GeneratorSystem& system, const Word& word, double x, std::size_t n, double delta,
                      const PreballOptions& options) {
  const HolderData holder = system.holder();
  if (!(delta > 0.0)) throw ParameterError("build_preball: delta must be > 0");
  if (delta > holder.epsilon)
    throw ParameterError("build_preball: delta exceeds the locality scale epsilon = " + std::to_string(holder.epsilon));
  if (!(options.sigma > 0.0 && options.sigma < 1.0)) throw ParameterError("build_preball: sigma must lie in (0,1)");
  const Domain dom = system.domain();
  if (dom.is_circle() && !(delta < 0.5)) throw ReduceDeltaError("ball of radius >= 1/2 wraps the circle", 0.499);

  const OrbitRecord orbit = compose_orbit(system, word, x, n);

  Preball pb{system, word, n, x, orbit.points, orbit.log_derivs, {}, {}, delta, options.sigma, 1.0, holder, false};
  if (n > 0) {
    const LogPhiSequence seq = log_phi_from_orbit(orbit, options.inflation);
    pb.certified = is_hyperbolic_time(seq, n, options.sigma);
    if (options.strict && !pb.certified)
      throw PreconditionError("order " + std::to_string(n) + " is not a sigma-hyperbolic time (sigma = " +
                              std::to_string(options.sigma) + ")");
  } else {
    pb.certified = true;
  }
  pb.distortion_K = distortion_constant(holder.constant, holder.alpha, delta, options.sigma);

  std::vector<double> left(n + 1), right(n + 1);
  const double xn = orbit.points[n];
  left[n] = dom.is_circle() ? delta : std::min(delta, xn);
  right[n] = dom.is_circle() ? delta : std::min(delta, 1.0 - xn);

  for (std::size_t i = n; i-- > 0;) {
    const SmoothMap1D& g = system[word.letters[i]];
    const double base = orbit.points[i];
    const double cap_right = dom.is_circle() ? 1.0 : 1.0 - base;
    const double cap_left = dom.is_circle() ? 1.0 : base;
    double r, l;
    if (g.orientation() > 0) {
      r = right[i + 1] > 0.0 ? pull_back_offset(g, base, right[i + 1], cap_right, delta) : 0.0;
      l = left[i + 1] > 0.0 ? -pull_back_offset(g, base, -left[i + 1], cap_left, delta) : 0.0;
    } else {
      r = left[i + 1] > 0.0 ? pull_back_offset(g, base, -left[i + 1], cap_right, delta) : 0.0;
      l = right[i + 1] > 0.0 ? -pull_back_offset(g, base, right[i + 1], cap_left, delta) : 0.0;
    }
    left[i] = l;
    right[i] = r;
    if (dom.is_circle() && l + r >= 1.0)
      throw ReduceDeltaError("pullback of the ball is not injective at step " + std::to_string(i),
                             delta * 0.999 / (l + r));
  }
  pb.left_extents = std::move(left);
  pb.right_extents = std::move(right);
  return pb;
}

ContractionReport verify_contraction(const Preball& pb, std::size_t samples) {
  if (samples < 2) throw ParameterError("verify_contraction: samples must be >= 2");
  const Domain dom = pb.system.domain();
  const std::size_t n = pb.order;
  std::vector<std::vector<double>> traj(samples);
  const double span = pb.left() + pb.right();
  for (std::size_t j = 0; j < samples; ++j) {
    const double u = j + 1 == samples ? pb.right() : -pb.left() + span * static_cast<double>(j) / (samples - 1);
    traj[j] = pb.offset_trajectory(u);
  }
  std::vector<double> lam_pow(n + 1, 1.0);
  for (std::size_t i = n; i-- > 0;) lam_pow[i] = lam_pow[i + 1] * pb.lambda;

  ContractionReport rep;
  rep.samples = samples;
  rep.max_margin = -std::numeric_limits<double>::infinity();
  rep.max_ratio_by_step.assign(n + 1, 0.0);
  for (std::size_t j = 0; j < samples; ++j) {
    for (std::size_t k = j + 1; k < samples; ++k) {
      ++rep.pairs;
      const double dn = dom.offset_length(traj[j][n] - traj[k][n]);
      for (std::size_t i = 0; i <= n; ++i) {
        const double di = dom.offset_length(traj[j][i] - traj[k][i]);
        const double bound = lam_pow[i] * dn;
        const double margin = di - bound;
        if (margin > rep.max_margin) {
          rep.max_margin = margin;
          rep.worst_step = i;
        }
        if (bound > 0.0) rep.max_ratio_by_step[i] = std::max(rep.max_ratio_by_step[i], di / bound);
      }
    }
  }
  rep.pass = rep.max_margin <= kContractionSlack;
  return rep;
}

RegularityRecord check_regularity(const Preball& pb) {
  RegularityRecord rec;
  const double K = pb.distortion_K;
  double log_deriv = 0.0;
  for (double ld : pb.log_derivs) log_deriv += ld;
  rec.birkhoff_phi = -log_deriv;
  const double scale = std::exp(rec.birkhoff_phi);
  rec.R = std::max(pb.left(), pb.right());
  rec.r = std::min(pb.left(), pb.right());
  rec.ratio = rec.r > 0.0 ? rec.R / rec.r : std::numeric_limits<double>::infinity();
  rec.L_bound = K * K;

  // Per side: an extent e pulled back from image width w obeys w K^{-1} e^{S} <= e <= w K e^{S}.
  const double w_min = std::min(pb.image_left(), pb.image_right());
  const double w_max = std::max(pb.image_left(), pb.image_right());
  rec.lower_bound = w_min / K * scale;
  rec.upper_bound = w_max * K * scale;
  rec.pass_lower = rec.r >= rec.lower_bound * (1.0 - kRelTol);
  rec.pass_upper = rec.R <= rec.upper_bound * (1.0 + kRelTol);
  const double ratio_bound = rec.L_bound * (w_min > 0.0 ? w_max / w_min : std::numeric_limits<double>::infinity());
  rec.pass_ratio = rec.ratio <= ratio_bound * (1.0 + kRelTol);
  rec.pass = rec.pass_lower && rec.pass_upper && rec.pass_ratio;
  return rec;
}

DistortionReport check_bounded_distortion(const Preball& pb,
                                          const std::vector<std::pair<OffsetInterval, OffsetInterval>>& pairs) {
  DistortionReport rep;
  rep.K_bound = pb.distortion_K;
  const std::size_t n = pb.order;
  const double lo_edge = -pb.left() * (1.0 + kRelTol) - 1e-15, hi_edge = pb.right() * (1.0 + kRelTol) + 1e-15;
  auto image_length = [&](const OffsetInterval& I) {
    return std::fabs(pb.offset_trajectory(I.hi)[n] - pb.offset_trajectory(I.lo)[n]);
  };
  for (const auto& [A, B] : pairs) {
    for (const OffsetInterval* I : {&A, &B})
      if (I->lo < lo_edge || I->hi > hi_edge || I->hi < I->lo)
        throw ParameterError("check_bounded_distortion: subinterval is not contained in the preball");
    if (!(B.length() > 0.0) || !(A.length() > 0.0)) {
      ++rep.skipped;
      continue;
    }
    const double ratio = (image_length(A) / image_length(B)) / (A.length() / B.length());
    rep.max_observed_ratio = std::max(rep.max_observed_ratio, ratio);
    ++rep.pairs_checked;
  }
  rep.pass = rep.max_observed_ratio <= rep.K_bound * (1.0 + kRelTol);
  rep.regularity = check_regularity(pb);
  return rep;
}

double uniform_preball_radius(const GeneratorSystem& system) {
  const double eps = system.holder().epsilon;
  const Domain dom = system.domain();
  constexpr std::size_t kCentres = 1u << 12;
  double sup_theta = 0.0;
  for (const auto& g : system.generators())
    for (std::size_t j = 0; j < kCentres; ++j)
      sup_theta = std::max(sup_theta, 1.0 / std::fabs(g.derivative(static_cast<double>(j) / kCentres)));

  auto injective = [&](double delta) {
    if (!dom.is_circle()) return true;  // interval maps are homeomorphisms onto their image
    const double rho = delta * sup_theta;
    if (2.0 * rho >= 1.0) return false;
    for (const auto& g : system.generators())
      for (std::size_t j = 0; j < kCentres; ++j) {
        const double c = static_cast<double>(j) / kCentres;
        if (std::fabs(g.increment(c - rho, 2.0 * rho)) >= 1.0) return false;
      }
    return true;
  };
  double best = eps;
  if (!injective(eps)) {
    double lo = 0.0, hi = eps;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (injective(mid) ? lo : hi) = mid;
    }
    best = lo;
  }
  return 0.5 * best;
}

json to_json(const Preball& pb) {
  auto [lo, hi] = pb.endpoints();
  return json{{"order", pb.order},
              {"x", pb.x},
              {"word", pb.word.letters},
              {"start_state", pb.word.start_state},
              {"interval", {{"center", pb.x}, {"left_extent", pb.left()}, {"right_extent", pb.right()},
                            {"left_endpoint", lo}, {"right_endpoint", hi}}},
              {"delta", pb.delta},
              {"lambda", pb.lambda},
              {"image_center", pb.image_center()},
              {"image_radius", pb.delta},
              {"image_extents", {pb.image_left(), pb.image_right()}},
              {"distortion_K", pb.distortion_K},
              {"holder", {{"alpha", pb.holder.alpha}, {"C1", pb.holder.constant}, {"epsilon", pb.holder.epsilon}}},
              {"certified_hyperbolic_time", pb.certified}};
}

json to_json(const ContractionReport& r) {
  return json{{"samples", r.samples},       {"pairs", r.pairs},
              {"max_margin", r.max_margin}, {"worst_step", r.worst_step},
              {"max_ratio_by_step", r.max_ratio_by_step}, {"pass", r.pass}};
}

json to_json(const RegularityRecord& r) {
  return json{{"R", r.R},
              {"r", r.r},
              {"ratio", r.ratio},
              {"birkhoff_phi", r.birkhoff_phi},
              {"lower_bound", r.lower_bound},
              {"upper_bound", r.upper_bound},
              {"L_bound", r.L_bound},
              {"pass", r.pass}};
}

json to_json(const DistortionReport& r) {
  return json{{"K_bound", r.K_bound},         {"max_observed_ratio", r.max_observed_ratio},
              {"pairs_checked", r.pairs_checked}, {"skipped", r.skipped},
              {"pass", r.pass},               {"regularity", to_json(r.regularity)}};
}

}  // namespace xlab
