#include "expansion_lab/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "expansion_lab/parallel.hpp"
#include "expansion_lab/rng.hpp"

namespace xlab {

namespace {

const Arc kFullArc{0.0, 1.0};

Arc normalize(Domain domain, double lo, double hi) {
  if (hi < lo) std::swap(lo, hi);
  if (domain.is_circle()) {
    if (hi - lo >= 1.0) return kFullArc;
    const double s = std::floor(lo);
    return {lo - s, hi - s};
  }
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

json word_json(const Word& w) { return json(w.letters); }

json arcs_json(const IntervalSet& set) {
  json out = json::array();
  for (const auto& a : set.arcs) out.push_back(json::array({a.lo, a.hi}));
  return out;
}

// Letter allowed after a word of length `len`.
bool letter_allowed(const GeneratorSystem& system, std::size_t len, std::size_t j) {
  return system.mode() == SystemMode::Semigroup || j == len;
}

// Marks the cells hit by `set`; returns how many non-exempt cells were newly covered.
std::size_t mark(const CellGrid& grid, const IntervalSet& set, std::vector<bool>& covered, const std::vector<bool>& exempt) {
  std::size_t fresh = 0;
  for (const auto& arc : set.arcs)
    grid.for_each_cell(arc, [&](std::size_t j) {
      if (!covered[j]) {
        covered[j] = true;
        if (!exempt[j]) ++fresh;
      }
    });
  return fresh;
}

std::size_t required_cells(const std::vector<bool>& exempt) {
  return static_cast<std::size_t>(std::count(exempt.begin(), exempt.end(), false));
}

}  // namespace

// ---------------------------------------------------------------------------

Arc image_arc(const SmoothMap1D& f, Arc arc) {
  const Domain dom = f.domain();
  if (dom.is_circle() && arc.length() >= 1.0) return kFullArc;
  return normalize(dom, f.lift(arc.lo), f.lift(arc.hi));
}

Arc ball_arc(Domain domain, double center, double radius) {
  if (!(radius > 0.0)) throw ParameterError("ball radius must be positive");
  const double c = domain.canonical(center);
  if (domain.is_circle() && 2.0 * radius >= 1.0) return kFullArc;
  return normalize(domain, c - radius, c + radius);
}

IntervalSet image_set(const SmoothMap1D& f, const IntervalSet& set) {
  IntervalSet out;
  out.arcs.reserve(set.arcs.size());
  for (const auto& a : set.arcs) out.arcs.push_back(image_arc(f, a));
  return out;
}

CellGrid::CellGrid(Domain domain, double eps_grid) : domain_(domain) {
  if (!(eps_grid > 0.0 && eps_grid <= 0.5)) throw ParameterError("eps_grid must lie in (0, 1/2]");
  const double n = std::round(1.0 / eps_grid);
  if (n > 16777216.0) throw ParameterError("eps_grid below 2^-24 is not supported");
  n_ = static_cast<std::size_t>(n);
}

void CellGrid::for_each_cell(Arc arc, const std::function<void(std::size_t)>& visit) const {
  if (domain_.is_circle()) {
    if (arc.length() >= 1.0) {
      for (std::size_t j = 0; j < n_; ++j) visit(j);
      return;
    }
    const double shift = std::floor(arc.lo);
    const double lo = arc.lo - shift, hi = arc.hi - shift;
    if (hi <= 1.0) {
      for_each_linear(lo, hi, visit);
    } else {
      for_each_linear(lo, 1.0, visit);
      for_each_linear(0.0, hi - 1.0, visit);
    }
    return;
  }
  for_each_linear(std::max(0.0, arc.lo), std::min(1.0, arc.hi), visit);
}

void CellGrid::for_each_linear(double lo, double hi, const std::function<void(std::size_t)>& visit) const {
  if (!(hi > lo)) return;
  std::size_t j = static_cast<std::size_t>(std::clamp(std::floor(lo * static_cast<double>(n_)), 0.0,
                                                      static_cast<double>(n_ - 1)));
  while (j > 0 && edge(j) > lo) --j;
  for (; j < n_ && edge(j) < hi; ++j)
    if (edge(j + 1) > lo) visit(j);
}

std::vector<bool> exempt_cells(const GeneratorSystem& system, const CellGrid& grid) {
  std::vector<bool> exempt(grid.size(), false);
  if (system.domain().is_circle()) return exempt;
  for (double p : {0.0, 1.0}) {
    bool ok = true;
    for (const auto& g : system.generators())
      ok = ok && std::fabs(g(p) - p) <= 1e-12 && std::fabs(g.derivative(p)) <= 1.0;
    if (ok) exempt[p == 0.0 ? 0 : grid.size() - 1] = true;
  }
  return exempt;
}

std::size_t CoverState::covered_count() const {
  return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
}

double CoverState::coverage_fraction() const {
  std::size_t need = 0, hit = 0;
  for (std::size_t j = 0; j < covered.size(); ++j) {
    if (exempt[j]) continue;
    ++need;
    if (covered[j]) ++hit;
  }
  return need ? static_cast<double>(hit) / static_cast<double>(need) : 1.0;
}

json to_json(const CoverState& s) {
  json images = json::array();
  for (const auto& im : s.images) images.push_back(json{{"word", word_json(im.word)}, {"image", arcs_json(im.image)}});
  std::vector<std::size_t> exempt;
  for (std::size_t j = 0; j < s.exempt.size(); ++j)
    if (s.exempt[j]) exempt.push_back(j);
  return json{{"eps_grid", s.eps_grid},
              {"cells", s.covered.size()},
              {"covered_cells", s.covered_count()},
              {"exempt_cells", exempt},
              {"coverage_fraction", s.coverage_fraction()},
              {"words_explored", s.words_explored},
              {"complete", s.complete},
              {"images", images}};
}

// ---------------------------------------------------------------------------

CoveringResult covering_time(const GeneratorSystem& system, const WordSource& word, double center, double radius,
                             double eps_grid, std::size_t budget) {
  const CellGrid grid(system.domain(), eps_grid);
  const std::vector<bool> exempt = exempt_cells(system, grid);
  const std::size_t need = required_cells(exempt);

  std::size_t limit = budget;
  if (auto len = word.length()) limit = std::min(limit, *len);
  const Word w = word.take(limit);
  check_word(system, w, limit);

  std::vector<char> marked(grid.size(), 0);
  std::vector<std::size_t> touched;
  CoveringResult res;
  Arc image = ball_arc(system.domain(), center, radius);
  for (std::size_t n = 0;; ++n) {
    std::size_t hit = 0;
    grid.for_each_cell(image, [&](std::size_t j) {
      if (marked[j]) return;
      marked[j] = 1;
      touched.push_back(j);
      if (!exempt[j]) ++hit;
    });
    for (std::size_t j : touched) marked[j] = 0;
    touched.clear();
    res.steps_tried = n;
    res.final_image = image;
    res.max_coverage = std::max(res.max_coverage, need ? static_cast<double>(hit) / static_cast<double>(need) : 1.0);
    if (hit == need) {
      res.n = n;
      return res;
    }
    if (n == limit) return res;
    image = image_arc(system[w.letters[n]], image);
  }
}

json to_json(const CoveringResult& r) {
  return json{{"covering_time", r.n ? json(*r.n) : json(nullptr)},
              {"max_coverage", r.max_coverage},
              {"steps_tried", r.steps_tried},
              {"final_image", json::array({r.final_image.lo, r.final_image.hi})}};
}

namespace {

// Breadth-first accumulation of images of `start` over words (length, then lexicographic).
CoverState bfs_cover(const GeneratorSystem& system, const IntervalSet& start, std::size_t budget, double eps_grid) {
  const CellGrid grid(system.domain(), eps_grid);
  CoverState st;
  st.eps_grid = grid.eps();
  st.covered.assign(grid.size(), false);
  st.exempt = exempt_cells(system, grid);
  std::size_t remaining = required_cells(st.exempt);

  struct Node {
    Word word;
    IntervalSet image;
  };
  std::deque<Node> queue;
  queue.push_back({Word{}, start});
  while (!queue.empty() && st.words_explored < budget) {
    Node node = std::move(queue.front());
    queue.pop_front();
    ++st.words_explored;
    const std::size_t fresh = mark(grid, node.image, st.covered, st.exempt);
    if (fresh > 0) {
      remaining -= fresh;
      st.images.push_back({node.word, node.image});
    }
    if (remaining == 0) {
      st.complete = true;
      break;
    }
    const std::size_t len = node.word.size();
    for (std::size_t j = 0; j < system.size(); ++j) {
      if (!letter_allowed(system, len, j)) continue;
      Node child{node.word, image_set(system[j], node.image)};
      child.word.letters.push_back(j);
      queue.push_back(std::move(child));
    }
  }
  return st;
}

}  // namespace

CoverState exactness_check(const GeneratorSystem& system, double center, double radius, std::size_t budget,
                           double eps_grid) {
  return bfs_cover(system, IntervalSet{{ball_arc(system.domain(), center, radius)}}, budget, eps_grid);
}

std::optional<std::vector<Word>> backward_minimality_check(const GeneratorSystem& system, const IntervalSet& open_set,
                                                           std::size_t budget, double eps_grid) {
  if (open_set.arcs.empty()) throw ParameterError("open set must be nonempty");
  IntervalSet start;
  for (const auto& a : open_set.arcs) start.arcs.push_back(normalize(system.domain(), a.lo, a.hi));
  const CoverState st = bfs_cover(system, start, budget, eps_grid);
  if (!st.complete) return std::nullopt;
  std::vector<Word> words;
  for (const auto& im : st.images) words.push_back(im.word);
  return words;
}

// ---------------------------------------------------------------------------

TestFunction TestFunction::trapezoid(double lo, double hi, double ramp) {
  if (!(lo <= hi) || !(ramp >= 0.0) || hi - lo + 2.0 * ramp > 1.0)
    throw ParameterError("trapezoid needs lo <= hi, ramp >= 0 and support length <= 1");
  TestFunction t;
  t.kind = Kind::Trapezoid;
  t.lo = lo;
  t.hi = hi;
  t.ramp = ramp;
  return t;
}

TestFunction TestFunction::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto num = [&](std::size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (const std::exception&) {
      throw ParameterError("malformed test function '" + text + "'");
    }
  };
  if (parts.empty()) throw ParameterError("empty test function");
  const std::string& head = parts[0];
  if ((head == "cos" || head == "sin") && parts.size() == 2) {
    const double k = num(1);
    if (k < 1 || k != std::round(k)) throw ParameterError("frequency must be a positive integer in '" + text + "'");
    return head == "cos" ? cosine(static_cast<int>(k)) : sine(static_cast<int>(k));
  }
  if (head == "const" && parts.size() == 2) return constant_fn(num(1));
  if (head == "trap" && parts.size() == 4) return trapezoid(num(1), num(2), num(3));
  throw ParameterError("unknown test function '" + text + "' (cos:k | sin:k | const:c | trap:lo:hi:ramp)");
}

std::string TestFunction::name() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::Trapezoid) {
    os << "trap:" << lo << ':' << hi << ':' << ramp;
  } else if (a == 0.0 && b == 0.0) {
    os << "const:" << constant;
  } else if (b == 0.0 && constant == 0.0 && a == 1.0) {
    os << "cos:" << k;
  } else if (a == 0.0 && constant == 0.0 && b == 1.0) {
    os << "sin:" << k;
  } else {
    os << "trig:" << k << ':' << constant << ':' << a << ':' << b;
  }
  return os.str();
}

double TestFunction::sup_norm() const {
  if (kind == Kind::Trapezoid) return 1.0;
  return std::fabs(constant) + std::hypot(a, b);
}

double TestFunction::integral() const {
  if (kind == Kind::Trapezoid) return hi - lo + ramp;
  return constant;
}

double TestFunction::centered(double x) const {
  if (kind == Kind::Trig) {
    const double t = kTwoPi * static_cast<double>(k) * x;
    return a * std::cos(t) + b * std::sin(t);
  }
  auto one = [&](double y) {
    if (y >= lo && y <= hi) return 1.0;
    if (ramp <= 0.0) return 0.0;
    if (y < lo) return std::max(0.0, 1.0 - (lo - y) / ramp);
    return std::max(0.0, 1.0 - (y - hi) / ramp);
  };
  return std::max({one(x - 1.0), one(x), one(x + 1.0)});
}

double TestFunction::centered_integral() const { return kind == Kind::Trig ? 0.0 : integral(); }

std::string BranchPolicy::id() const {
  switch (kind) {
    case Kind::Fixed:
      return "fixed";
    case Kind::Greedy:
      return "greedy";
    case Kind::Random:
      return "random";
  }
  return "unknown";
}

ErgodicityReport equidistribution_test(const GeneratorSystem& system, const BranchPolicy& policy,
                                       const std::vector<TestFunction>& functions, const EquidistributionOptions& opt) {
  if (opt.horizon < 1) throw ParameterError("equidistribution_test: horizon must be >= 1");
  if (opt.init_points < 1) throw ParameterError("equidistribution_test: need at least one initial point");
  if (functions.empty()) throw ParameterError("equidistribution_test: no test functions");
  if (!(opt.dither >= 0.0)) throw ParameterError("equidistribution_test: dither must be >= 0");
  const Domain dom = system.domain();
  for (const auto& f : functions) {
    if (f.kind == TestFunction::Kind::Trig && f.k < 1) throw ParameterError("trig frequency must be >= 1");
    if (f.kind == TestFunction::Kind::Trapezoid && !dom.is_circle() && (f.lo - f.ramp < 0.0 || f.hi + f.ramp > 1.0))
      throw ParameterError("trapezoid support must lie in [0,1] on the interval");
  }
  if (system.mode() == SystemMode::Sequence && opt.horizon > system.size())
    throw LengthError("sequence system has " + std::to_string(system.size()) + " maps, horizon is " +
                      std::to_string(opt.horizon));
  if (policy.kind == BranchPolicy::Kind::Fixed) {
    const Word w = policy.word.take(std::min<std::size_t>(opt.horizon, policy.word.length().value_or(opt.horizon)));
    check_word(system, w, opt.horizon);
  }

  const std::size_t nf = functions.size();
  ErgodicityReport rep;
  rep.functions = functions;
  rep.options = opt;
  rep.policy = policy.id();
  rep.per_point.assign(opt.init_points, std::vector<double>(nf, 0.0));
  rep.initial_points.assign(opt.init_points, 0.0);
  const std::size_t stride = std::max<std::size_t>(1, opt.horizon / std::max<std::size_t>(1, opt.series_points));

  parallel_for(opt.init_points, [&](std::size_t p) {
    CounterRng state_rng(opt.seed, 2 * p);
    CounterRng letter_rng(opt.seed, 2 * p + 1);
    double x = state_rng.uniform();
    rep.initial_points[p] = x;
    std::vector<double> sums(nf, 0.0);
    for (std::size_t i = 0; i < opt.horizon; ++i) {
      for (std::size_t q = 0; q < nf; ++q) sums[q] += functions[q].centered(x);
      if (p == 0 && (i + 1) % stride == 0) {
        std::vector<double> avg(nf);
        for (std::size_t q = 0; q < nf; ++q) avg[q] = sums[q] / static_cast<double>(i + 1);
        rep.series_steps.push_back(i + 1);
        rep.series.push_back(std::move(avg));
      }
      std::size_t letter = 0;
      if (system.mode() == SystemMode::Sequence) {
        letter = i;
      } else if (policy.kind == BranchPolicy::Kind::Fixed) {
        letter = policy.word.letter(i);
      } else if (policy.kind == BranchPolicy::Kind::Random) {
        letter = static_cast<std::size_t>(letter_rng.below(system.size()));
      } else {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < system.size(); ++j) {
          const double v = std::fabs(system[j].derivative(x));
          if (v > best) {
            best = v;
            letter = j;
          }
        }
      }
      x = system[letter](x);
      if (opt.dither > 0.0) x = dom.canonical(x + opt.dither * (2.0 * state_rng.uniform() - 1.0));
    }
    for (std::size_t q = 0; q < nf; ++q)
      rep.per_point[p][q] = std::fabs(sums[q] / static_cast<double>(opt.horizon) - functions[q].centered_integral());
  });

  rep.deviations.assign(nf, 0.0);
  rep.tolerances.resize(nf);
  rep.pass = true;
  for (std::size_t q = 0; q < nf; ++q) {
    for (const auto& row : rep.per_point) rep.deviations[q] = std::max(rep.deviations[q], row[q]);
    rep.tolerances[q] = opt.tolerance.value_or(10.0 * functions[q].sup_norm() / std::sqrt(static_cast<double>(opt.horizon)));
    rep.pass = rep.pass && rep.deviations[q] <= rep.tolerances[q];
  }
  return rep;
}

json to_json(const ErgodicityReport& r) {
  json fns = json::array();
  for (std::size_t q = 0; q < r.functions.size(); ++q)
    fns.push_back(json{{"name", r.functions[q].name()},
                       {"integral", r.functions[q].integral()},
                       {"deviation", r.deviations[q]},
                       {"tolerance", r.tolerances[q]},
                       {"pass", r.deviations[q] <= r.tolerances[q]}});
  json points = json::array();
  for (std::size_t p = 0; p < r.initial_points.size(); ++p)
    points.push_back(json{{"x0", r.initial_points[p]}, {"deviations", r.per_point[p]}});
  return json{{"policy", r.policy},
              {"horizon", r.options.horizon},
              {"init_points", r.options.init_points},
              {"dither", r.options.dither},
              {"functions", fns},
              {"points", points},
              {"pass", r.pass}};
}

// ---------------------------------------------------------------------------

ClosureResult invariant_set_closure(const GeneratorSystem& system, const std::vector<std::size_t>& seed_cells,
                                    double eps_grid, std::size_t max_iters) {
  if (seed_cells.empty()) throw ParameterError("invariant_set_closure: seed_cells must be nonempty");
  const CellGrid grid(system.domain(), eps_grid);
  ClosureResult res;
  res.cells.assign(grid.size(), false);
  std::vector<std::size_t> frontier;
  for (std::size_t c : seed_cells) {
    if (c >= grid.size()) throw ParameterError("seed cell " + std::to_string(c) + " outside the grid");
    if (!res.cells[c]) {
      res.cells[c] = true;
      frontier.push_back(c);
    }
  }
  while (!frontier.empty() && res.iterations < max_iters) {
    std::vector<std::size_t> next;
    for (std::size_t c : frontier) {
      const Arc cell{grid.edge(c), grid.edge(c + 1)};
      for (const auto& g : system.generators())
        grid.for_each_cell(image_arc(g, cell), [&](std::size_t j) {
          if (!res.cells[j]) {
            res.cells[j] = true;
            next.push_back(j);
          }
        });
    }
    ++res.iterations;
    frontier = std::move(next);
  }
  res.converged = frontier.empty();
  res.fraction = static_cast<double>(std::count(res.cells.begin(), res.cells.end(), true)) /
                 static_cast<double>(grid.size());
  return res;
}

json to_json(const ClosureResult& r) {
  std::vector<std::size_t> cells;
  for (std::size_t j = 0; j < r.cells.size(); ++j)
    if (r.cells[j]) cells.push_back(j);
  return json{{"cells", r.cells.size()},
              {"closure_cells", cells.size()},
              {"fraction", r.fraction},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"closure", cells}};
}

}  // namespace xlab
