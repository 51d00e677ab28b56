#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expansion_lab/system.hpp"

namespace xlab {

// ---------------------------------------------------------------------------
// Uniform expansion

struct UniformExpansionFit {
  double C = 0.0;
  double lambda = 1.0;
  bool pass = false;
  std::vector<double> envelope;  // min over the grid of log|(f^i)'(x)|, i = 1..n
};

/// Fits log C + i log lambda under the grid envelope of log|(f^i_w)'(x)|: log lambda is the
/// least-squares slope of the envelope, log C the largest intercept keeping the line below it.
/// pass iff lambda > 1.
UniformExpansionFit check_uniform_expansion(const GeneratorSystem& system, const WordSource& words,
                                            std::size_t grid_size, std::size_t n);

// ---------------------------------------------------------------------------
// Branch search

struct SearchStrategy {
  enum class Kind { Greedy, Beam, Exhaustive };
  Kind kind = Kind::Greedy;
  std::size_t param = 0;  // beam width or exhaustive block depth

  static SearchStrategy greedy() { return {Kind::Greedy, 0}; }
  static SearchStrategy beam(std::size_t width = 8) { return {Kind::Beam, width}; }
  static SearchStrategy exhaustive(std::size_t depth) { return {Kind::Exhaustive, depth}; }
  /// "greedy", "beam:8", "exhaustive:6".
  static SearchStrategy parse(const std::string& text);
  std::string id() const;
};

inline constexpr std::size_t kExhaustiveNodeCap = 1'000'000;

struct BranchSearchResult {
  Word word;
  double exponent = 0.0;  // finite-horizon Birkhoff average of log theta
};

/// Minimizes the Birkhoff average of log theta over words of length `horizon`. Greedy takes the
/// steepest generator at each step (ties to the lowest index); beam keeps the `width` best
/// prefixes; exhaustive commits the best block of length `depth` at a time.
BranchSearchResult search_expanding_branch(const GeneratorSystem& system, double x, std::size_t horizon,
                                           const SearchStrategy& strategy);

// ---------------------------------------------------------------------------
// Classification

struct ClassifyOptions {
  std::size_t samples = 1000;
  std::size_t horizon = 1000;
  SearchStrategy strategy = SearchStrategy::greedy();
  double a_threshold = -1e-6;     // exponents below this count as negative
  double tolerance = 0.01;        // admissible exception fraction for the almost-every-x verdicts
  std::uint64_t seed = 0;
  std::size_t candidate_words = 8;
  std::size_t uniform_grid = 256;
  std::size_t prefix_length = 32;  // word letters kept per sample in the report
};

struct SampleRecord {
  double x = 0.0;
  std::vector<std::size_t> word_prefix;
  double exponent = 0.0;
  double hyperbolic_density = 0.0;
};

struct ClassificationReport {
  std::vector<SampleRecord> samples;
  ClassifyOptions options;
  std::size_t resampled = 0;

  bool uniformly_expanding = false;
  double uniform_C = 0.0;
  double uniform_lambda = 1.0;

  bool nonuniformly_expanding = false;
  std::vector<std::size_t> witness_prefix;
  double witness_fraction = 0.0;

  bool expandable = false;
  double expandable_fraction = 0.0;

  std::optional<double> strong_a;
};

/// Runs the branch search on a seeded Lebesgue sample and derives the verdicts, enforcing
/// uniform => non-uniform => expandable.
ClassificationReport classify_action(const GeneratorSystem& system, const ClassifyOptions& options);

json to_json(const ClassificationReport& report);

// ---------------------------------------------------------------------------
// Backward expansion, covers, and the diffeomorphism obstruction

/// Shortest word h (breadth first, lexicographic) with |h'(x)| > 1, up to length max_len.
std::optional<Word> backward_expanding_check(const GeneratorSystem& system, double x, std::size_t max_len);

/// A cover element: the closed arc [lo, hi] (wrapping through 0 on the circle when lo > hi) and the
/// word applied to points in it.
struct CoverElement {
  double lo = 0.0;
  double hi = 1.0;
  Word word;

  bool contains(Domain domain, double x) const;
};

struct CoverBlock {
  std::size_t element = 0;
  std::size_t start = 0;  // position of the block in the branch word
  double point = 0.0;     // point at which the block starts
  double log_theta_sum = 0.0;
};

/// Lazily extended branch through a cover: at each block the current point picks, among the
/// elements containing it, the one with the smallest log-theta block sum (ties to the lowest index).
/// Every block sum is checked against log sigma as it is emitted.
class CoverBranch {
 public:
  CoverBranch(const GeneratorSystem& system, std::vector<CoverElement> cover, double sigma, double x);

  const CoverBlock& next_block();
  void extend_to(std::size_t length);

  const Word& word() const { return word_; }
  const std::vector<CoverBlock>& blocks() const { return blocks_; }
  double point() const { return point_; }
  double log_theta_total() const { return total_; }
  /// limsup of the Birkhoff averages of log theta is at most log(sigma) / k, k the longest cover word.
  double certified_bound() const;

 private:
  const GeneratorSystem* system_;
  std::vector<CoverElement> cover_;
  double sigma_;
  double point_;
  double total_ = 0.0;
  std::size_t max_len_ = 1;
  Word word_;
  std::vector<CoverBlock> blocks_;
};

CoverBranch build_branch_from_cover(const GeneratorSystem& system, std::vector<CoverElement> cover, double sigma,
                                    double x, std::size_t horizon);

struct ObstructionReport {
  std::size_t samples = 0;
  std::size_t n = 0;
  double integral_estimate = 0.0;  // Monte Carlo mean of |(f^n_w)'|
  double standard_error = 0.0;
  double z_score = 0.0;
  bool pass = false;               // within 4 standard errors of 1
  double mean_log_exponent = 0.0;  // mean of (1/n) log|(f^n_w)'|
  double positive_fraction = 0.0;  // samples with log|(f^n_w)'| > 0
  bool jensen_consistent = false;  // E log J <= log E J
};

/// Change-of-variables check for global diffeomorphisms: the integral of |(f^n_w)'| is 1.
ObstructionReport diffeo_obstruction_check(const GeneratorSystem& system, const Word& word, std::size_t n,
                                           std::size_t mc_samples, std::uint64_t seed);

json to_json(const ObstructionReport& report);

}  // namespace xlab
