#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "expansion_lab/system.hpp"

namespace xlab {

// ---------------------------------------------------------------------------
// Exact interval images

/// A closed arc [lo, hi] in lift coordinates (lo in [0,1) on the circle); hi - lo >= 1 is the whole circle.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

/// Image of an arc under a generator, computed through the lift (exact up to rounding, no sampling).
Arc image_arc(const SmoothMap1D& f, Arc arc);

/// The ball B(center, radius) as an arc; clipped to [0,1] on the interval.
Arc ball_arc(Domain domain, double center, double radius);

/// A finite union of arcs.
struct IntervalSet {
  std::vector<Arc> arcs;
};

IntervalSet image_set(const SmoothMap1D& f, const IntervalSet& set);

// ---------------------------------------------------------------------------
// Grid coverage

/// Cells [j/N, (j+1)/N], j < N = round(1/eps_grid). A cell is hit by an arc when their overlap has
/// positive length.
class CellGrid {
 public:
  CellGrid(Domain domain, double eps_grid);

  Domain domain() const { return domain_; }
  std::size_t size() const { return n_; }
  double edge(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_); }
  double eps() const { return 1.0 / static_cast<double>(n_); }

  /// Calls visit(j) for every cell overlapping the arc.
  void for_each_cell(Arc arc, const std::function<void(std::size_t)>& visit) const;

 private:
  void for_each_linear(double lo, double hi, const std::function<void(std::size_t)>& visit) const;

  Domain domain_;
  std::size_t n_;
};

/// Cells exempt from covering: cells containing an endpoint of the interval that every generator fixes
/// with |f'| <= 1 there.
std::vector<bool> exempt_cells(const GeneratorSystem& system, const CellGrid& grid);

struct CoverImage {
  Word word;
  IntervalSet image;
};

struct CoverState {
  double eps_grid = 0.0;
  std::vector<bool> covered;
  std::vector<bool> exempt;
  std::vector<CoverImage> images;  // images that hit a new cell, in discovery order
  std::size_t words_explored = 0;
  bool complete = false;

  std::size_t covered_count() const;
  /// Covered fraction of the cells that are not exempt.
  double coverage_fraction() const;
};

json to_json(const CoverState& state);

// ---------------------------------------------------------------------------
// Covering and exactness

struct CoveringResult {
  std::optional<std::size_t> n;  // first time f^n(B) hits every non-exempt cell
  double max_coverage = 0.0;     // best covered fraction seen
  std::size_t steps_tried = 0;
  Arc final_image;
};

/// Iterates the exact image of B(center, radius) along the word until it hits every grid cell.
CoveringResult covering_time(const GeneratorSystem& system, const WordSource& word, double center, double radius,
                             double eps_grid, std::size_t budget = 10'000);

json to_json(const CoveringResult& r);

/// Breadth-first over words (by length, then lexicographic), accumulating f^n_w(B) until every
/// non-exempt cell is hit or `budget` words have been explored.
CoverState exactness_check(const GeneratorSystem& system, double center, double radius, std::size_t budget = 10'000,
                           double eps_grid = 0x1.0p-10);

/// Words h_1..h_m (breadth first, the empty word included) whose images h_i(U) cover the grid, or none
/// within the budget.
std::optional<std::vector<Word>> backward_minimality_check(const GeneratorSystem& system, const IntervalSet& open_set,
                                                           std::size_t budget = 10'000, double eps_grid = 0x1.0p-10);

// ---------------------------------------------------------------------------
// Equidistribution

/// Observable with a closed-form Lebesgue integral.
///
/// Trig: constant + a cos(2 pi k x) + b sin(2 pi k x). Its deviation is measured on the oscillating
/// part, so a constant function has deviation exactly 0.
/// Trapezoid: 1 on [lo, hi], linear ramps of width `ramp` on both sides, 0 elsewhere (periodic on the circle).
struct TestFunction {
  enum class Kind { Trig, Trapezoid };
  Kind kind = Kind::Trig;
  int k = 1;
  double constant = 0.0, a = 1.0, b = 0.0;
  double lo = 0.0, hi = 0.0, ramp = 0.0;

  static TestFunction cosine(int k) { return {Kind::Trig, k, 0.0, 1.0, 0.0}; }
  static TestFunction sine(int k) { return {Kind::Trig, k, 0.0, 0.0, 1.0}; }
  static TestFunction constant_fn(double c) { return {Kind::Trig, 1, c, 0.0, 0.0}; }
  static TestFunction trapezoid(double lo, double hi, double ramp);
  /// "cos:k", "sin:k", "const:c", "trap:lo:hi:ramp".
  static TestFunction parse(const std::string& text);

  std::string name() const;
  double sup_norm() const;
  double integral() const;
  /// The part whose time average is compared against `integral()`: the oscillating part for Trig.
  double centered(double x) const;
  double centered_integral() const;
};

struct BranchPolicy {
  enum class Kind { Fixed, Greedy, Random };
  Kind kind = Kind::Fixed;
  WordSource word = WordSource::constant(0);

  static BranchPolicy fixed(WordSource w) { return {Kind::Fixed, std::move(w)}; }
  static BranchPolicy greedy() { return {Kind::Greedy, WordSource::constant(0)}; }
  static BranchPolicy random() { return {Kind::Random, WordSource::constant(0)}; }
  std::string id() const;
};

struct EquidistributionOptions {
  std::size_t horizon = 1'000'000;
  std::size_t init_points = 10;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;  // default 10 n^{-1/2} ||phi||_inf per function
  double dither = 1e-14;            // seeded uniform perturbation added to each iterate
  std::size_t series_points = 200;  // running-average checkpoints kept for the first initial point
};

struct ErgodicityReport {
  std::vector<TestFunction> functions;
  std::vector<double> tolerances;
  std::vector<double> deviations;                 // worst over initial points, per function
  std::vector<std::vector<double>> per_point;     // [point][function]
  std::vector<double> initial_points;
  std::vector<std::size_t> series_steps;          // checkpoints of the running averages
  std::vector<std::vector<double>> series;        // [checkpoint][function], first initial point
  std::string policy;
  EquidistributionOptions options;
  bool pass = false;
};

/// Compares Birkhoff averages along seeded orbits with the Lebesgue integrals of the test functions.
ErgodicityReport equidistribution_test(const GeneratorSystem& system, const BranchPolicy& policy,
                                       const std::vector<TestFunction>& functions, const EquidistributionOptions& options);

json to_json(const ErgodicityReport& r);

// ---------------------------------------------------------------------------
// Forward-invariant sets

struct ClosureResult {
  std::vector<bool> cells;
  double fraction = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Smallest cell set containing the seeds that contains every cell hit by f_j(cell) for each of its
/// cells and every generator j (an outer approximation of the forward-invariant hull).
ClosureResult invariant_set_closure(const GeneratorSystem& system, const std::vector<std::size_t>& seed_cells,
                                    double eps_grid = 0x1.0p-10, std::size_t max_iters = 100'000);

json to_json(const ClosureResult& r);

}  // namespace xlab
