#include "expansion_lab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "expansion_lab/system_io.hpp"

namespace xlab {

GeneratorSystem doubling_system() {
  return GeneratorSystem(Domain(DomainKind::Circle), {make_family_map("doubling", json::object(), Domain(DomainKind::Circle))});
}

GeneratorSystem perturbed_doubling(double eps) {
  const Domain circle(DomainKind::Circle);
  return GeneratorSystem(circle, {make_family_map("perturbed_doubling", json{{"eps", eps}}, circle)});
}

GeneratorSystem rotation_system(double gamma) {
  const Domain circle(DomainKind::Circle);
  return GeneratorSystem(circle, {make_family_map("rotation", json{{"gamma", gamma}}, circle)});
}

GeneratorSystem identity_system(Domain domain) {
  return GeneratorSystem(domain, {make_family_map("identity", json::object(), domain)});
}

GeneratorSystem mobius_pair(double s0, double s1) {
  const Domain interval(DomainKind::UnitInterval);
  return GeneratorSystem(interval, {make_family_map("mobius", json{{"s", s0}}, interval),
                                    make_family_map("mobius", json{{"s", s1}}, interval)});
}

// ---------------------------------------------------------------------------

IntervalExampleParams IntervalExampleParams::create(double a, double c1, double c2, double b, double df0_at_0,
                                                    double df1_at_0, double df1_at_1) {
  if (!(0.0 < a && a < c1 && c1 < c2 && c2 < b && b < 1.0))
    throw InvariantViolation("ordering", "need 0 < a < c1 < c2 < b < 1");
  if (!(df0_at_0 > 0.0 && df0_at_0 < 1.0)) throw ParameterError("f0'(0) must lie in (0,1)");
  if (!(df1_at_0 > 1.0)) throw ParameterError("f1'(0) must exceed 1");
  if (!(df1_at_1 > 0.0 && df1_at_1 <= 1.0)) throw ParameterError("f1'(1) must lie in (0,1]");
  IntervalExampleParams p;
  p.a_ = a;
  p.c1_ = c1;
  p.c2_ = c2;
  p.b_ = b;
  p.df0_at_0_ = df0_at_0;
  p.df1_at_0_ = df1_at_0;
  p.df1_at_1_ = df1_at_1;
  return p;
}

IntervalExampleParams IntervalExampleParams::from_json(const json& j) {
  const auto d = defaults();
  if (!j.is_null() && !j.is_object()) throw ParameterError("example params must be a JSON object");
  auto get = [&](const char* key, double fallback) {
    if (j.is_object() && j.contains(key)) {
      if (!j[key].is_number()) throw ParameterError(std::string("parameter '") + key + "' must be a number");
      return j[key].get<double>();
    }
    return fallback;
  };
  return create(get("a", d.a()), get("c1", d.c1()), get("c2", d.c2()), get("b", d.b()), get("df0_at_0", d.df0_at_0()),
                get("df1_at_0", d.df1_at_0()), get("df1_at_1", d.df1_at_1()));
}

json IntervalExampleParams::to_json() const {
  return json{{"a", a_},   {"c1", c1_},  {"c2", c2_}, {"b", b_}, {"df0_at_0", df0_at_0_}, {"df1_at_0", df1_at_0_},
              {"df1_at_1", df1_at_1_}};
}

namespace {

struct Profile {
  std::vector<double> knots, derivs;
};

// Cumulative trapezoid integral of a piecewise linear derivative profile.
std::vector<double> integrate(const Profile& p) {
  std::vector<double> v(p.knots.size(), 0.0);
  for (std::size_t i = 1; i < p.knots.size(); ++i)
    v[i] = v[i - 1] + 0.5 * (p.knots[i] - p.knots[i - 1]) * (p.derivs[i] + p.derivs[i - 1]);
  return v;
}

// Sets the free profile entries to t and solves the (affine) equation integral = 1.
double solve_free(Profile p, const std::vector<std::size_t>& free) {
  for (std::size_t i : free) p.derivs[i] = 0.0;
  const double i0 = integrate(p).back();
  for (std::size_t i : free) p.derivs[i] = 1.0;
  const double i1 = integrate(p).back();
  return (1.0 - i0) / (i1 - i0);
}

// Exact Lipschitz constant of log g for a positive piecewise linear g.
double log_profile_lipschitz(const Profile& p) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < p.knots.size(); ++i) {
    const double slope = std::fabs(p.derivs[i + 1] - p.derivs[i]) / (p.knots[i + 1] - p.knots[i]);
    c = std::max(c, slope / std::min(p.derivs[i], p.derivs[i + 1]));
  }
  return c;
}

SmoothMap1D profile_map(Profile p) {
  std::vector<double> values = integrate(p);
  values.front() = 0.0;
  values.back() = 1.0;
  const double lip = log_profile_lipschitz(p);
  return make_spline_map(Domain(DomainKind::UnitInterval), std::move(p.knots), std::move(values), std::move(p.derivs),
                         1.0, lip);
}

std::vector<double> grid_on(double lo, double hi, std::size_t cells) {
  std::vector<double> xs(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) xs[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(cells);
  xs.back() = hi;
  return xs;
}

constexpr std::size_t kConditionGrid = 1u << 12;
constexpr std::size_t kFixedPointGrid = 1u << 14;

}  // namespace

GeneratorSystem paper_interval_example(const IntervalExampleParams& prm) {
  const double a = prm.a(), c1 = prm.c1(), c2 = prm.c2(), b = prm.b();
  const double xs = c1 + 0.25 * (c2 - c1);

  Profile p1{{0.0, 0.5 * a, a, c1, xs, c2, b, 1.0}, {prm.df1_at_0(), 1.15, 1.1, 1.1, 1.1, 0.7, 0.0, prm.df1_at_1()}};
  p1.derivs[6] = solve_free(p1, {6});
  if (!(p1.derivs[6] > 0.0)) throw ExampleInvalid("construction: f1 cannot reach 1 with a positive derivative on [b,1]");

  Profile p0{{0.0, c1, xs, c2, b, 1.0}, {prm.df0_at_0(), 1.0, 1.15, 0.0, 0.0, 1.0}};
  const double q = solve_free(p0, {3, 4});
  p0.derivs[3] = p0.derivs[4] = q;
  if (!(q > 0.0)) throw ExampleInvalid("construction: f0 cannot reach 1 with a positive derivative on [c2,b]");

  GeneratorSystem system(Domain(DomainKind::UnitInterval), {profile_map(std::move(p0)), profile_map(std::move(p1))});
  for (const auto& g : system.generators()) validate_map(g);
  const ConditionReport report = verify_example_conditions(system, prm);
  for (const auto& c : report.conditions)
    if (!c.pass) throw ExampleInvalid("condition " + c.id + " fails: " + c.description + " " + c.witness.dump());
  return system;
}

// ---------------------------------------------------------------------------

json to_json(const ConditionReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions)
    conds.push_back(json{{"id", c.id}, {"description", c.description}, {"pass", c.pass}, {"witness", c.witness}});
  return json{{"conditions", conds}, {"all_pass", r.all_pass}};
}

ConditionReport verify_example_conditions(const GeneratorSystem& system, const IntervalExampleParams& prm) {
  ConditionReport rep;
  auto add = [&](std::string id, std::string desc, bool pass, json witness) {
    rep.conditions.push_back({std::move(id), std::move(desc), pass, std::move(witness)});
  };
  const char* d1 = "f0 and f1 are diffeomorphisms of [0,1] whose only fixed points are 0 and 1";
  const char* d2 = "f0'(0) < 1, f0'(1) = 1, f1'(0) > 1, f1'(1) <= 1";
  const char* d3 = "log f0'(0) / log f1'(0) is irrational";
  const char* d4a = "f0([c1,b]) and f1([a,c2]) lie in [a,b]";
  const char* d4b = "f1' > 1 on [a,c1] and f0' > 1 on [c2,b]";
  const char* d4c = "min over [c1,c2] of max(f0', f1') > 1";

  std::string shape_error;
  if (system.domain().is_circle()) shape_error = "domain is the circle";
  else if (system.size() != 2) shape_error = "system must have exactly two generators";
  if (!shape_error.empty()) {
    const std::pair<const char*, const char*> all[] = {{"1", d1}, {"2", d2},   {"3", d3},
                                                        {"4a", d4a}, {"4b", d4b}, {"4c", d4c}};
    for (const auto& [id, desc] : all) add(id, desc, false, json{{"error", shape_error}});
    return rep;
  }
  const SmoothMap1D& f0 = system[0];
  const SmoothMap1D& f1 = system[1];
  auto df0 = [&](double x) { return std::fabs(f0.derivative(x)); };
  auto df1 = [&](double x) { return std::fabs(f1.derivative(x)); };

  // (1)
  {
    json w = json::array();
    bool ok = true;
    const auto xs = grid_on(0.0, 1.0, kFixedPointGrid);
    for (std::size_t i = 0; i < 2; ++i) {
      const SmoothMap1D& f = system[i];
      const bool diffeo = f.branch_count() == 1 && f.orientation() == 1;
      const bool ends = std::fabs(f(0.0)) <= 1e-12 && std::fabs(f(1.0) - 1.0) <= 1e-12;
      int sign = 0;
      bool constant_sign = true;
      double min_gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
        const double g = f(xs[j]) - xs[j];
        const int s = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign)) constant_sign = false;
        if (sign == 0) sign = s;
        min_gap = std::min(min_gap, std::fabs(g));
      }
      ok = ok && diffeo && ends && constant_sign;
      w.push_back(json{{"generator", i},
                       {"increasing_diffeomorphism", diffeo},
                       {"endpoints_fixed", ends},
                       {"interior_sign", sign},
                       {"no_interior_fixed_point", constant_sign},
                       {"min_abs_f_minus_x", min_gap}});
    }
    add("1", d1, ok, w);
  }
  // (2)
  {
    const double a0 = df0(0.0), a1 = df0(1.0), b0 = df1(0.0), b1 = df1(1.0);
    add("2", d2, a0 < 1.0 && std::fabs(a1 - 1.0) <= 1e-9 && b0 > 1.0 && b1 <= 1.0 + 1e-9,
        json{{"df0_at_0", a0}, {"df0_at_1", a1}, {"df1_at_0", b0}, {"df1_at_1", b1}});
  }
  // (3)
  {
    const double a0 = df0(0.0), b0 = df1(0.0);
    json w{{"df0_at_0", a0}, {"df1_at_0", b0}};
    bool ok;
    if (a0 == 0.5 && b0 == 3.0) {
      w["certificate"] = "exact: log(1/2)/log 3 = -p/q would force 2^p = 3^q with p, q > 0, impossible by parity";
      ok = true;
    } else if (a0 == 1.0 || b0 == 1.0) {
      ok = false;
      w["certificate"] = "degenerate: a logarithm vanishes";
    } else {
      const double r = std::log(a0) / std::log(b0);
      double best = std::numeric_limits<double>::infinity();
      for (int qd = 1; qd <= 1000; ++qd) best = std::min(best, std::fabs(r * qd - std::round(r * qd)) / qd);
      ok = best > 1e-12;
      w["ratio"] = r;
      w["closest_rational_gap"] = best;
      w["certificate"] = "numerical: no p/q with q <= 1000 within 1e-12";
    }
    add("3", d3, ok, w);
  }
  const double a = prm.a(), c1 = prm.c1(), c2 = prm.c2(), b = prm.b();
  // (4a)
  {
    double lo0 = 1.0, hi0 = 0.0, lo1 = 1.0, hi1 = 0.0;
    for (double x : grid_on(c1, b, kConditionGrid)) {
      lo0 = std::min(lo0, f0(x));
      hi0 = std::max(hi0, f0(x));
    }
    for (double x : grid_on(a, c2, kConditionGrid)) {
      lo1 = std::min(lo1, f1(x));
      hi1 = std::max(hi1, f1(x));
    }
    add("4a", d4a, lo0 >= a && hi0 <= b && lo1 >= a && hi1 <= b,
        json{{"f0_image", {lo0, hi0}}, {"f1_image", {lo1, hi1}}, {"target", {a, b}}});
  }
  // (4b)
  {
    double m1 = std::numeric_limits<double>::infinity(), m0 = m1, at1 = a, at0 = c2;
    for (double x : grid_on(a, c1, kConditionGrid))
      if (df1(x) < m1) {
        m1 = df1(x);
        at1 = x;
      }
    for (double x : grid_on(c2, b, kConditionGrid))
      if (df0(x) < m0) {
        m0 = df0(x);
        at0 = x;
      }
    add("4b", d4b, m1 > 1.0 && m0 > 1.0,
        json{{"min_df1_on_a_c1", m1}, {"argmin_df1", at1}, {"min_df0_on_c2_b", m0}, {"argmin_df0", at0}});
  }
  // (4c)
  {
    double m = std::numeric_limits<double>::infinity(), at = c1;
    for (double x : grid_on(c1, c2, kConditionGrid)) {
      const double v = std::max(df0(x), df1(x));
      if (v < m) {
        m = v;
        at = x;
      }
    }
    add("4c", d4c, m > 1.0, json{{"min_max_derivative", m}, {"argmin", at}});
  }
  rep.all_pass = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& c) { return c.pass; });
  return rep;
}

// ---------------------------------------------------------------------------

TrappingResult reach_trapping_region(const GeneratorSystem& system, const IntervalExampleParams& prm, double x,
                                     std::size_t budget) {
  if (!(x > 0.0 && x < 1.0)) throw ParameterError("reach_trapping_region: x must lie in (0,1)");
  if (system.size() != 2) throw ParameterError("reach_trapping_region: expected two generators");
  auto inside = [&](double y) { return y >= prm.a() && y <= prm.b(); };
  if (inside(x)) return {std::nullopt, 0, x};
  double y0 = x, y1 = x;
  for (std::size_t m = 1; m <= budget; ++m) {
    y0 = system[0](y0);
    y1 = system[1](y1);
    if (inside(y0)) return {0, m, y0};
    if (inside(y1)) return {1, m, y1};
  }
  throw BudgetExhausted("reach_trapping_region: no iterate of x = " + std::to_string(x) + " entered [a,b] within " +
                        std::to_string(budget) + " steps (f0: " + std::to_string(y0) + ", f1: " + std::to_string(y1) +
                        ")");
}

Word staying_branch(const GeneratorSystem& system, const IntervalExampleParams& prm, double x, std::size_t horizon) {
  if (system.size() != 2) throw ParameterError("staying_branch: expected two generators");
  const double a = prm.a(), c1 = prm.c1(), c2 = prm.c2(), b = prm.b();
  if (!(x >= a && x <= b)) throw ParameterError("staying_branch: x must lie in [a,b]");
  Word w;
  w.letters.reserve(horizon);
  for (std::size_t n = 0; n < horizon; ++n) {
    std::size_t j;
    if (x <= c1) {
      j = 1;
    } else if (x >= c2) {
      j = 0;
    } else {
      j = std::fabs(system[1].derivative(x)) >= std::fabs(system[0].derivative(x)) ? 1 : 0;
    }
    const double d = std::fabs(system[j].derivative(x));
    if (!(d > 1.0))
      throw ExampleInvalid("staying_branch: derivative " + std::to_string(d) + " <= 1 at step " + std::to_string(n) +
                           ", x = " + std::to_string(x));
    x = system[j](x);
    if (!(x >= a && x <= b))
      throw ExampleInvalid("staying_branch: left [a,b] at step " + std::to_string(n + 1) + ", x = " + std::to_string(x));
    w.letters.push_back(j);
  }
  return w;
}

std::vector<CoverElement> example_cover(const IntervalExampleParams& prm) {
  return {CoverElement{prm.a(), prm.c2(), Word{{1}, 0}}, CoverElement{prm.c1(), prm.b(), Word{{0}, 0}}};
}

double example_cover_sigma(const GeneratorSystem& system, const IntervalExampleParams& prm) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : grid_on(prm.a(), prm.b(), kConditionGrid)) {
    double best = 0.0;
    if (x <= prm.c2()) best = std::max(best, std::fabs(system[1].derivative(x)));
    if (x >= prm.c1()) best = std::max(best, std::fabs(system[0].derivative(x)));
    m = std::min(m, best);
  }
  if (!(m > 1.0)) throw ExampleInvalid("cover: some point of [a,b] has no expanding element");
  return 1.0 / (1.0 + 0.5 * (m - 1.0));
}

void write_example_figure_csv(std::ostream& os, const GeneratorSystem& system, std::size_t points) {
  if (points < 2) throw ParameterError("figure needs at least 2 points");
  if (system.size() != 2) throw ParameterError("figure: expected two generators");
  const auto old = os.precision(17);
  os << "x,f0,f1\n";
  for (double x : grid_on(0.0, 1.0, points - 1)) os << x << ',' << system[0](x) << ',' << system[1](x) << '\n';
  os.precision(old);
}

GeneratorSystem catalog_system(const std::string& name, const json& params) {
  auto num = [&](const char* key, double fallback) {
    if (params.is_object() && params.contains(key)) {
      if (!params[key].is_number()) throw ParameterError(std::string("parameter '") + key + "' must be a number");
      return params[key].get<double>();
    }
    return fallback;
  };
  if (name == "doubling") return doubling_system();
  if (name == "perturbed") return perturbed_doubling(num("eps", 0.5));
  if (name == "rotation") return rotation_system(num("gamma", 0.5 * (std::sqrt(5.0) - 1.0)));
  if (name == "identity")
    return identity_system(params.is_object() && params.value("domain", std::string("circle")) == "interval"
                               ? Domain(DomainKind::UnitInterval)
                               : Domain(DomainKind::Circle));
  if (name == "mobius-pair") return mobius_pair(num("s0", 2.0), num("s1", 0.5));
  if (name == "paper-interval") return paper_interval_example(IntervalExampleParams::from_json(params));
  throw ParameterError("unknown example '" + name + "' (doubling | perturbed | rotation | identity | mobius-pair | paper-interval)");
}

}  // namespace xlab
