#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expansion_lab/classify.hpp"
#include "expansion_lab/system.hpp"

namespace xlab {

GeneratorSystem doubling_system();
/// f(x) = 2x + eps sin(2 pi x) / (2 pi) mod 1, |eps| < 1 so that f' >= 2 - |eps| > 1.
GeneratorSystem perturbed_doubling(double eps);
GeneratorSystem rotation_system(double gamma);
GeneratorSystem identity_system(Domain domain);
/// Two Möbius diffeomorphisms of [0,1] with slopes s0 and s1 at 0.
GeneratorSystem mobius_pair(double s0 = 2.0, double s1 = 0.5);

/// 0 < a < c1 < c2 < b < 1 plus the prescribed endpoint derivatives of the two generators.
class IntervalExampleParams {
 public:
  /// Throws InvariantViolation("ordering", ...) unless 0 < a < c1 < c2 < b < 1.
  static IntervalExampleParams create(double a, double c1, double c2, double b, double df0_at_0 = 0.5,
                                      double df1_at_0 = 3.0, double df1_at_1 = 0.9);
  static IntervalExampleParams defaults() { return create(0.2, 0.35, 0.55, 0.8); }
  static IntervalExampleParams from_json(const json& j);

  double a() const { return a_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double b() const { return b_; }
  double df0_at_0() const { return df0_at_0_; }
  double df1_at_0() const { return df1_at_0_; }
  double df1_at_1() const { return df1_at_1_; }

  json to_json() const;

 private:
  IntervalExampleParams() = default;
  double a_ = 0, c1_ = 0, c2_ = 0, b_ = 0, df0_at_0_ = 0, df1_at_0_ = 0, df1_at_1_ = 0;
};

/// Two increasing spline diffeomorphisms f0, f1 of [0,1] fixing only 0 and 1, with piecewise linear
/// derivative profiles: f0'(0) = df0_at_0, f0'(1) = 1, f1'(0) = df1_at_0, f1'(1) = df1_at_1, f1' > 1 on
/// [a,c1], f0' > 1 on [c2,b] and max(f0', f1') > 1 on [c1,c2]. Throws ExampleInvalid naming the first
/// failed condition when the parameters admit no such pair of this shape.
GeneratorSystem paper_interval_example(const IntervalExampleParams& params = IntervalExampleParams::defaults());

struct ConditionResult {
  std::string id;
  std::string description;
  bool pass = false;
  json witness;
};

struct ConditionReport {
  std::vector<ConditionResult> conditions;
  bool all_pass = false;
};

json to_json(const ConditionReport& r);

/// Grid checks of conditions (1)-(4) for a pair f0, f1 on [0,1]; failures are reported, never thrown.
ConditionReport verify_example_conditions(const GeneratorSystem& system, const IntervalExampleParams& params);

struct TrappingResult {
  std::optional<std::size_t> generator;  // none when x already lies in [a,b]
  std::size_t steps = 0;
  double point = 0.0;
};

/// First (i, m) with f_i^m(x) in [a,b], iterating f0 and f1 separately (ties to f0).
TrappingResult reach_trapping_region(const GeneratorSystem& system, const IntervalExampleParams& params, double x,
                                     std::size_t budget = 100'000);

/// The branch that keeps the orbit of x in [a,b] with derivative > 1 at every step: f1 on [a,c1], f0 on
/// [c2,b], the steeper generator on (c1,c2). Every step is checked; a failure throws ExampleInvalid.
Word staying_branch(const GeneratorSystem& system, const IntervalExampleParams& params, double x, std::size_t horizon);

/// The cover {[a,c2] -> f1, [c1,b] -> f0} of [a,b].
std::vector<CoverElement> example_cover(const IntervalExampleParams& params);
/// A contraction rate sigma < 1 valid for example_cover: 1/sigma is half way between 1 and the grid minimum
/// of the best available derivative on [a,b].
double example_cover_sigma(const GeneratorSystem& system, const IntervalExampleParams& params);

/// Rows x,f0,f1 on `points` equispaced points of [0,1].
void write_example_figure_csv(std::ostream& os, const GeneratorSystem& system, std::size_t points = 513);

/// Catalog lookup by name: doubling, perturbed {eps}, rotation {gamma}, identity, mobius-pair {s0, s1},
/// paper-interval {a, c1, c2, b}.
GeneratorSystem catalog_system(const std::string& name, const json& params);

}  // namespace xlab
