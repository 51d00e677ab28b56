#include "expansion_lab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "expansion_lab/parallel.hpp"
#include "expansion_lab/pliss.hpp"
#include "expansion_lab/rng.hpp"

namespace xlab {

namespace {

double log_abs_derivative(const SmoothMap1D& f, double x) { return std::log(std::fabs(f.derivative(x))); }

// Birkhoff sum of log theta along a materialized word.
double log_theta_sum(const GeneratorSystem& system, const Word& word, double x, std::size_t n) {
  return -log_derivative_of_composition(system, word, x, n);
}

std::vector<double> exceptional_points(const GeneratorSystem& system) {
  const Domain dom = system.domain();
  std::vector<double> candidates = dom.is_circle() ? std::vector<double>{0.0} : std::vector<double>{0.0, 1.0};
  std::vector<double> out;
  for (double p : candidates) {
    bool fixed = true;
    for (const auto& g : system.generators()) fixed = fixed && dom.distance(g(p), p) <= 1e-12;
    if (fixed) out.push_back(p);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

UniformExpansionFit check_uniform_expansion(const GeneratorSystem& system, const WordSource& words,
                                            std::size_t grid_size, std::size_t n) {
  if (grid_size < 2) throw ParameterError("check_uniform_expansion: grid_size must be >= 2");
  if (n < 1) throw ParameterError("check_uniform_expansion: n must be >= 1");
  const Word word = words.take(n);
  check_word(system, word, n);

  UniformExpansionFit fit;
  fit.envelope.assign(n, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < grid_size; ++j) {
    double x = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const SmoothMap1D& f = system[word.letters[i]];
      s += log_abs_derivative(f, x);
      x = f(x);
      fit.envelope[i] = std::min(fit.envelope[i], s);
    }
  }
  double slope;
  if (n == 1) {
    slope = fit.envelope[0];
  } else {
    const double mean_i = 0.5 * static_cast<double>(n + 1);
    const double mean_m = std::accumulate(fit.envelope.begin(), fit.envelope.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = static_cast<double>(i + 1) - mean_i;
      sxy += di * (fit.envelope[i] - mean_m);
      sxx += di * di;
    }
    slope = sxy / sxx;
  }
  double log_c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) log_c = std::min(log_c, fit.envelope[i] - static_cast<double>(i + 1) * slope);
  fit.lambda = std::exp(slope);
  fit.C = std::exp(log_c);
  fit.pass = slope > 1e-12;
  return fit;
}

// ---------------------------------------------------------------------------

SearchStrategy SearchStrategy::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::size_t value = 0;
  if (colon != std::string::npos) {
    try {
      value = std::stoul(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParameterError("strategy parameter must be a positive integer: '" + text + "'");
    }
  }
  if (head == "greedy") return greedy();
  if (head == "beam") return beam(colon == std::string::npos ? 8 : value);
  if (head == "exhaustive") {
    if (colon == std::string::npos) throw ParameterError("exhaustive strategy needs a depth, e.g. exhaustive:6");
    return exhaustive(value);
  }
  throw ParameterError("unknown strategy '" + text + "' (greedy | beam:k | exhaustive:depth)");
}

std::string SearchStrategy::id() const {
  switch (kind) {
    case Kind::Greedy:
      return "greedy";
    case Kind::Beam:
      return "beam:" + std::to_string(param);
    case Kind::Exhaustive:
      return "exhaustive:" + std::to_string(param);
  }
  return "unknown";
}

namespace {

BranchSearchResult search_greedy(const GeneratorSystem& system, double x, std::size_t horizon) {
  BranchSearchResult res;
  res.word.letters.reserve(horizon);
  double total = 0.0;
  for (std::size_t step = 0; step < horizon; ++step) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < system.size(); ++j) {
      const double v = -log_abs_derivative(system[j], x);
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    res.word.letters.push_back(best);
    total += best_val;
    x = system[best](x);
  }
  res.exponent = horizon ? total / static_cast<double>(horizon) : 0.0;
  return res;
}

BranchSearchResult search_beam(const GeneratorSystem& system, double x, std::size_t horizon, std::size_t width) {
  if (width == 0) throw ParameterError("beam width must be >= 1");
  struct Node {
    double point, sum;
    std::size_t parent, letter;
  };
  // layers[t] holds the beam after t letters; parents index into layers[t-1].
  std::vector<std::vector<Node>> layers;
  layers.push_back({{x, 0.0, 0, 0}});
  const std::size_t d = system.size();
  for (std::size_t step = 0; step < horizon; ++step) {
    const auto& prev = layers.back();
    std::vector<Node> next;
    next.reserve(prev.size() * d);
    for (std::size_t p = 0; p < prev.size(); ++p)
      for (std::size_t j = 0; j < d; ++j) {
        const double v = -log_abs_derivative(system[j], prev[p].point);
        next.push_back({system[j](prev[p].point), prev[p].sum + v, p, j});
      }
    // Stable order keeps lexicographic precedence among equal sums.
    std::stable_sort(next.begin(), next.end(), [](const Node& a, const Node& b) { return a.sum < b.sum; });
    if (next.size() > width) next.resize(width);
    layers.push_back(std::move(next));
  }
  BranchSearchResult res;
  res.word.letters.resize(horizon);
  std::size_t idx = 0;
  for (std::size_t t = horizon; t > 0; --t) {
    res.word.letters[t - 1] = layers[t][idx].letter;
    idx = layers[t][idx].parent;
  }
  res.exponent = horizon ? layers.back().front().sum / static_cast<double>(horizon) : 0.0;
  return res;
}

BranchSearchResult search_exhaustive(const GeneratorSystem& system, double x, std::size_t horizon, std::size_t depth) {
  if (depth == 0) throw ParameterError("exhaustive depth must be >= 1");
  const std::size_t d = system.size();
  double nodes = std::pow(static_cast<double>(d), static_cast<double>(depth));
  if (nodes > static_cast<double>(kExhaustiveNodeCap))
    throw ParameterError("exhaustive search exceeds the node cap (d^depth > 1e6)");

  BranchSearchResult res;
  double total = 0.0;
  std::vector<std::size_t> current, best;
  while (res.word.size() < horizon) {
    const std::size_t len = std::min(depth, horizon - res.word.size());
    double best_sum = std::numeric_limits<double>::infinity();
    current.assign(len, 0);
    best.clear();
    // Depth-first, lexicographic; strict improvement keeps the lexicographically first minimizer.
    std::vector<double> points(len + 1), sums(len + 1);
    points[0] = x;
    sums[0] = 0.0;
    std::size_t level = 0;
    std::vector<std::size_t> next_letter(len, 0);
    while (true) {
      if (level == len) {
        if (sums[len] < best_sum) {
          best_sum = sums[len];
          best = current;
        }
        --level;
        continue;
      }
      if (next_letter[level] == d) {
        next_letter[level] = 0;
        if (level == 0) break;
        --level;
        continue;
      }
      const std::size_t j = next_letter[level]++;
      current[level] = j;
      sums[level + 1] = sums[level] - log_abs_derivative(system[j], points[level]);
      points[level + 1] = system[j](points[level]);
      ++level;
    }
    for (std::size_t j : best) {
      total -= log_abs_derivative(system[j], x);
      x = system[j](x);
      res.word.letters.push_back(j);
    }
  }
  res.exponent = horizon ? total / static_cast<double>(horizon) : 0.0;
  return res;
}

}  // namespace

BranchSearchResult search_expanding_branch(const GeneratorSystem& system, double x, std::size_t horizon,
                                           const SearchStrategy& strategy) {
  if (horizon < 1) throw ParameterError("search_expanding_branch: horizon must be >= 1");
  if (system.mode() == SystemMode::Sequence) {
    BranchSearchResult res;
    res.word = sequence_word(0, horizon);
    res.exponent = log_theta_sum(system, res.word, x, horizon) / static_cast<double>(horizon);
    return res;
  }
  switch (strategy.kind) {
    case SearchStrategy::Kind::Greedy:
      return search_greedy(system, x, horizon);
    case SearchStrategy::Kind::Beam:
      return search_beam(system, x, horizon, strategy.param);
    case SearchStrategy::Kind::Exhaustive:
      return search_exhaustive(system, x, horizon, strategy.param);
  }
  throw ParameterError("unknown search strategy");
}

// ---------------------------------------------------------------------------

ClassificationReport classify_action(const GeneratorSystem& system, const ClassifyOptions& opt) {
  if (opt.samples < 1) throw ParameterError("classify_action: sample_count must be >= 1");
  if (opt.horizon < 1) throw ParameterError("classify_action: horizon must be >= 1");
  ClassificationReport rep;
  rep.options = opt;
  rep.samples.resize(opt.samples);
  const std::vector<double> exceptional = exceptional_points(system);
  const Domain dom = system.domain();
  std::vector<std::size_t> resampled(opt.samples, 0);
  std::vector<Word> words(opt.samples);

  parallel_for(opt.samples, [&](std::size_t i) {
    CounterRng rng(opt.seed, i);
    double x = rng.uniform();
    auto near_exception = [&](double p) {
      for (double e : exceptional)
        if (dom.distance(p, e) < 1e-9) return true;
      return false;
    };
    while (near_exception(x)) {
      x = rng.uniform();
      ++resampled[i];
    }
    BranchSearchResult br = search_expanding_branch(system, x, opt.horizon, opt.strategy);
    SampleRecord& rec = rep.samples[i];
    rec.x = x;
    rec.exponent = br.exponent;
    rec.word_prefix.assign(br.word.letters.begin(),
                           br.word.letters.begin() + static_cast<std::ptrdiff_t>(std::min(opt.prefix_length, br.word.size())));
    if (br.exponent < 0.0) {
      const LogPhiSequence seq = log_phi_from_orbit(compose_orbit(system, br.word, x, opt.horizon));
      rec.hyperbolic_density = hyperbolic_times(seq, -br.exponent).density;
    }
    words[i] = std::move(br.word);
  });
  rep.resampled = std::accumulate(resampled.begin(), resampled.end(), std::size_t{0});

  const double n_samples = static_cast<double>(opt.samples);
  std::size_t negative = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    if (s.exponent < opt.a_threshold) ++negative;
    worst = std::max(worst, s.exponent);
  }
  rep.expandable_fraction = static_cast<double>(negative) / n_samples;
  rep.expandable = rep.expandable_fraction >= 1.0 - opt.tolerance;
  if (negative == opt.samples) rep.strong_a = -worst;

  // One word for (almost) every sample: try the branches found for the first samples and the constant words.
  std::vector<Word> candidates;
  if (system.mode() == SystemMode::Sequence) {
    candidates.push_back(sequence_word(0, opt.horizon));
  } else {
    for (std::size_t i = 0; i < std::min(opt.candidate_words, opt.samples); ++i) candidates.push_back(words[i]);
    for (std::size_t j = 0; j < system.size(); ++j) candidates.push_back(WordSource::constant(j).take(opt.horizon));
  }
  std::vector<double> fractions(candidates.size(), 0.0);
  parallel_for(candidates.size(), [&](std::size_t c) {
    std::size_t ok = 0;
    for (const auto& s : rep.samples)
      if (log_theta_sum(system, candidates[c], s.x, opt.horizon) / static_cast<double>(opt.horizon) < opt.a_threshold)
        ++ok;
    fractions[c] = static_cast<double>(ok) / n_samples;
  });
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c)
    if (fractions[c] > fractions[best]) best = c;
  rep.witness_fraction = fractions[best];
  const Word& witness = candidates[best];
  rep.witness_prefix.assign(witness.letters.begin(),
                            witness.letters.begin() + static_cast<std::ptrdiff_t>(std::min(opt.prefix_length, witness.size())));
  rep.nonuniformly_expanding = rep.expandable && rep.witness_fraction >= 1.0 - opt.tolerance;

  if (rep.nonuniformly_expanding) {
    const UniformExpansionFit fit =
        check_uniform_expansion(system, WordSource::fixed(witness), opt.uniform_grid, opt.horizon);
    rep.uniform_C = fit.C;
    rep.uniform_lambda = fit.lambda;
    rep.uniformly_expanding = fit.pass;
  }
  return rep;
}

json to_json(const ClassificationReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back(json{{"x", s.x},
                           {"word_prefix", s.word_prefix},
                           {"exponent", s.exponent},
                           {"hyperbolic_density", s.hyperbolic_density}});
  json verdicts{{"uniformly_expanding", {{"pass", r.uniformly_expanding}, {"C", r.uniform_C}, {"lambda", r.uniform_lambda}}},
                {"nonuniformly_expanding",
                 {{"pass", r.nonuniformly_expanding}, {"witness_prefix", r.witness_prefix}, {"witness_fraction", r.witness_fraction}}},
                {"expandable", {{"pass", r.expandable}, {"fraction", r.expandable_fraction}}},
                {"strong_a", r.strong_a ? json(*r.strong_a) : json(nullptr)}};
  return json{{"sample_size", r.options.samples},
              {"horizon", r.options.horizon},
              {"strategy", r.options.strategy.id()},
              {"a_threshold", r.options.a_threshold},
              {"tolerance", r.options.tolerance},
              {"resampled", r.resampled},
              {"verdicts", verdicts},
              {"samples", samples}};
}

// ---------------------------------------------------------------------------

std::optional<Word> backward_expanding_check(const GeneratorSystem& system, double x, std::size_t max_len) {
  if (max_len < 1) throw ParameterError("backward_expanding_check: max_len must be >= 1");
  struct Node {
    Word word;
    double point, log_deriv;
  };
  std::deque<Node> frontier;
  frontier.push_back({Word{}, x, 0.0});
  std::size_t visited = 0;
  while (!frontier.empty()) {
    Node node = std::move(frontier.front());
    frontier.pop_front();
    if (node.word.size() >= max_len) continue;
    const std::size_t len = node.word.size();
    for (std::size_t j = 0; j < system.size(); ++j) {
      if (system.mode() == SystemMode::Sequence && j != len) continue;
      if (++visited > kExhaustiveNodeCap) return std::nullopt;
      Node child{node.word, system[j](node.point), node.log_deriv + log_abs_derivative(system[j], node.point)};
      child.word.letters.push_back(j);
      if (child.log_deriv > 0.0) return child.word;
      frontier.push_back(std::move(child));
    }
  }
  return std::nullopt;
}

bool CoverElement::contains(Domain domain, double x) const {
  x = domain.canonical(x);
  if (lo <= hi) return x >= lo && x <= hi;
  return domain.is_circle() && (x >= lo || x <= hi);
}

CoverBranch::CoverBranch(const GeneratorSystem& system, std::vector<CoverElement> cover, double sigma, double x)
    : system_(&system), cover_(std::move(cover)), sigma_(sigma), point_(system.domain().canonical(x)) {
  if (!(sigma_ > 0.0 && sigma_ < 1.0)) throw ParameterError("cover sigma must lie in (0,1)");
  if (cover_.empty()) throw ParameterError("cover must be nonempty");
  max_len_ = 0;
  for (const auto& e : cover_) {
    if (e.word.size() == 0) throw ParameterError("cover words must be nonempty");
    check_word(system, e.word, e.word.size());
    max_len_ = std::max(max_len_, e.word.size());
  }
}

const CoverBlock& CoverBranch::next_block() {
  const GeneratorSystem& system = *system_;
  std::size_t chosen = cover_.size();
  double chosen_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cover_.size(); ++i) {
    if (!cover_[i].contains(system.domain(), point_)) continue;
    const double s = log_theta_sum(system, cover_[i].word, point_, cover_[i].word.size());
    if (s < chosen_sum) {
      chosen_sum = s;
      chosen = i;
    }
  }
  if (chosen == cover_.size()) throw CoverIncomplete("point lies in no cover element", point_);
  if (chosen_sum > std::log(sigma_) + kHyperbolicSlack)
    throw PreconditionError("cover element " + std::to_string(chosen) + " does not contract by sigma at x = " +
                            std::to_string(point_));
  blocks_.push_back({chosen, word_.size(), point_, chosen_sum});
  for (std::size_t j : cover_[chosen].word.letters) {
    point_ = system[j](point_);
    word_.letters.push_back(j);
  }
  total_ += chosen_sum;
  return blocks_.back();
}

void CoverBranch::extend_to(std::size_t length) {
  while (word_.size() < length) next_block();
}

double CoverBranch::certified_bound() const { return std::log(sigma_) / static_cast<double>(max_len_); }

CoverBranch build_branch_from_cover(const GeneratorSystem& system, std::vector<CoverElement> cover, double sigma,
                                    double x, std::size_t horizon) {
  CoverBranch branch(system, std::move(cover), sigma, x);
  branch.extend_to(horizon);
  return branch;
}

// ---------------------------------------------------------------------------

ObstructionReport diffeo_obstruction_check(const GeneratorSystem& system, const Word& word, std::size_t n,
                                           std::size_t mc_samples, std::uint64_t seed) {
  const Domain dom = system.domain();
  for (std::size_t i = 0; i < system.size(); ++i) {
    const SmoothMap1D& g = system[i];
    if (g.branch_count() != 1)
      throw PreconditionError("generator " + std::to_string(i) + " is not a diffeomorphism (branch_count " +
                              std::to_string(g.branch_count()) + ")");
    if (!dom.is_circle()) {
      const double a = g.lift(0.0), b = g.lift(1.0);
      if (std::min(a, b) != 0.0 || std::max(a, b) != 1.0)
        throw PreconditionError("generator " + std::to_string(i) + " does not map [0,1] onto itself");
    }
  }
  if (mc_samples < 2) throw ParameterError("diffeo_obstruction_check: need at least 2 samples");
  check_word(system, word, n);

  CounterRng rng(seed, 0);
  double sum = 0.0, sum_sq = 0.0, sum_log = 0.0;
  std::size_t positive = 0;
  for (std::size_t k = 0; k < mc_samples; ++k) {
    const double x = rng.uniform();
    const double log_j = log_derivative_of_composition(system, word, x, n);
    const double j = std::exp(log_j);
    sum += j;
    sum_sq += j * j;
    sum_log += log_j;
    if (log_j > 0.0) ++positive;
  }
  const double N = static_cast<double>(mc_samples);
  ObstructionReport rep;
  rep.samples = mc_samples;
  rep.n = n;
  rep.integral_estimate = sum / N;
  const double var = std::max(0.0, (sum_sq - N * rep.integral_estimate * rep.integral_estimate) / (N - 1.0));
  rep.standard_error = std::sqrt(var / N);
  const double dev = std::fabs(rep.integral_estimate - 1.0);
  if (rep.standard_error > 0.0) {
    rep.z_score = dev / rep.standard_error;
    rep.pass = rep.z_score <= 4.0;
  } else {
    rep.z_score = 0.0;
    rep.pass = dev <= 1e-12;
  }
  rep.mean_log_exponent = n ? sum_log / N / static_cast<double>(n) : 0.0;
  rep.positive_fraction = static_cast<double>(positive) / N;
  rep.jensen_consistent = sum_log / N <= std::log(rep.integral_estimate) + 4.0 * rep.standard_error / rep.integral_estimate;
  return rep;
}

json to_json(const ObstructionReport& r) {
  return json{{"samples", r.samples},
              {"n", r.n},
              {"integral_estimate", r.integral_estimate},
              {"standard_error", r.standard_error},
              {"z_score", r.z_score},
              {"pass", r.pass},
              {"mean_log_exponent", r.mean_log_exponent},
              {"positive_fraction", r.positive_fraction},
              {"jensen_consistent", r.jensen_consistent}};
}

}  // namespace xlab
