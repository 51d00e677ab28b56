#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expansion_lab/catalog.hpp"
#include "expansion_lab/classify.hpp"
#include "expansion_lab/preball.hpp"
#include "expansion_lab/rng.hpp"
#include "oracles.hpp"

using namespace xlab;

namespace {

const ConditionResult& condition(const ConditionReport& r, const std::string& id) {
  for (const auto& c : r.conditions)
    if (c.id == id) return c;
  throw std::runtime_error("no condition " + id);
}

}  // namespace

TEST(Doubling, ClosedForm) {
  const auto sys = doubling_system();
  EXPECT_NEAR(sys[0](0.3), 0.6, 1e-15);
  EXPECT_EQ(sys[0].branch_count(), 2u);
  EXPECT_EQ(sys[0].holder().constant, 0.0);
  CounterRng rng(61);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform();
    EXPECT_EQ(sys[0].derivative(x), 2.0);
    EXPECT_NEAR(log_inverse_lipschitz(sys[0], x), -std::log(2.0), 1e-15);
    EXPECT_NEAR(sys[0](x), oracle::frac(2.0 * x), 1e-15);
  }
}

TEST(PerturbedDoubling, ZeroCoincidesWithDoubling) {
  const auto p = perturbed_doubling(0.0), d = doubling_system();
  CounterRng rng(62);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    EXPECT_EQ(p[0](x), d[0](x));
    EXPECT_EQ(p[0].derivative(x), d[0].derivative(x));
  }
}

TEST(PerturbedDoubling, MinimumDerivativeAndRange) {
  const auto p = perturbed_doubling(0.5);
  double lo = 1e9;
  for (int i = 0; i <= 4096; ++i) lo = std::min(lo, p[0].derivative(i / 4096.0));
  EXPECT_NEAR(lo, 1.5, 1e-12);
  EXPECT_NEAR(p[0](0.25), oracle::frac(0.5 + 0.5 / (2.0 * oracle::kPi)), 1e-15);
  EXPECT_THROW(perturbed_doubling(1.0), ParameterError);
  EXPECT_THROW(perturbed_doubling(-1.5), ParameterError);
}

TEST(PerturbedDoubling, PreballDistortionWithinCatalogConstant) {
  const auto sys = perturbed_doubling(0.5);
  const double C1 = 0.5 * 2.0 * oracle::kPi / 1.5;
  CounterRng rng(63);
  PreballOptions o;
  o.sigma = 1.0 / 1.5;
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto pb = build_preball(sys, WordSource::constant(0).take(n), rng.uniform(), n, 0.05, o);
    std::vector<std::pair<OffsetInterval, OffsetInterval>> pairs;
    for (int i = 0; i < 30; ++i) {
      const double a = rng.uniform(-pb.left(), pb.right()), b = rng.uniform(-pb.left(), pb.right());
      const double c = rng.uniform(-pb.left(), pb.right()), d = rng.uniform(-pb.left(), pb.right());
      pairs.push_back({{std::min(a, b), std::max(a, b)}, {std::min(c, d), std::max(c, d)}});
    }
    const auto r = check_bounded_distortion(pb, pairs);
    EXPECT_LE(r.max_observed_ratio, distortion_constant(C1, 1.0, 0.05, 1.0 / 1.5) * (1 + 1e-9));
  }
}

TEST(IntervalExample, FixedPointsAndEndpointDerivatives) {
  const auto sys = paper_interval_example();
  for (const auto& f : sys.generators()) {
    EXPECT_EQ(f(0.0), 0.0);
    EXPECT_EQ(f(1.0), 1.0);
  }
  EXPECT_NEAR(sys[0].derivative(0.0), 0.5, 1e-9);
  EXPECT_NEAR(sys[0].derivative(1.0), 1.0, 1e-9);
  EXPECT_NEAR(sys[1].derivative(0.0), 3.0, 1e-9);
  EXPECT_NEAR(sys[1].derivative(1.0), 0.9, 1e-9);
  EXPECT_LT(sys[0].derivative(0.0), 1.0);
  EXPECT_GT(sys[1].derivative(0.0), 1.0);
  EXPECT_LE(sys[1].derivative(1.0), 1.0);
}

TEST(IntervalExample, MatchesIndependentProfileIntegration) {
  const auto sys = paper_interval_example();
  const oracle::PaperPair ref;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_NEAR(sys[0](x), ref.f0(x), 1e-12) << x;
    EXPECT_NEAR(sys[1](x), ref.f1(x), 1e-12) << x;
    EXPECT_NEAR(sys[0].derivative(x), ref.df0(x), 1e-12) << x;
    EXPECT_NEAR(sys[1].derivative(x), ref.df1(x), 1e-12) << x;
  }
}

TEST(IntervalExample, NoInteriorFixedPoints) {
  const oracle::PaperPair ref;
  for (int i = 1; i < (1 << 14); ++i) {
    const double x = i / 16384.0;
    EXPECT_LT(ref.f0(x), x);
    EXPECT_GT(ref.f1(x), x);
  }
}

TEST(IntervalExample, ConditionFourOnGrid) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  const int N = 1 << 12;
  for (int i = 0; i <= N; ++i) {
    const double t = i / static_cast<double>(N);
    const double x_cb = p.c1() + t * (p.b() - p.c1());
    const double x_ac = p.a() + t * (p.c2() - p.a());
    EXPECT_GE(sys[0](x_cb), p.a());
    EXPECT_LE(sys[0](x_cb), p.b());
    EXPECT_GE(sys[1](x_ac), p.a());
    EXPECT_LE(sys[1](x_ac), p.b());
    EXPECT_GT(sys[1].derivative(p.a() + t * (p.c1() - p.a())), 1.05);
    EXPECT_GT(sys[0].derivative(p.c2() + t * (p.b() - p.c2())), 1.05);
    const double m = p.c1() + t * (p.c2() - p.c1());
    EXPECT_GT(std::max(sys[0].derivative(m), sys[1].derivative(m)), 1.05);
  }
}

TEST(IntervalExample, VerifierAllPass) {
  const auto r = verify_example_conditions(paper_interval_example(), IntervalExampleParams::defaults());
  EXPECT_TRUE(r.all_pass);
  for (const char* id : {"1", "2", "3", "4a", "4b", "4c"}) EXPECT_TRUE(condition(r, id).pass) << id;
  const auto j = to_json(r);
  EXPECT_TRUE(j["all_pass"].get<bool>());
}

TEST(IntervalExample, VerifierRejectsDoublingPair) {
  const GeneratorSystem pair(Domain(DomainKind::Circle), {doubling_system()[0], doubling_system()[0]});
  const auto r = verify_example_conditions(pair, IntervalExampleParams::defaults());
  EXPECT_FALSE(r.all_pass);
  EXPECT_FALSE(condition(r, "1").pass);
}

TEST(IntervalExample, VerifierFlagsWrongEndpointSlopes) {
  // The Möbius pair fixes only 0 and 1 but f0'(1) = 1/2 != 1.
  const auto r = verify_example_conditions(mobius_pair(0.5, 3.0), IntervalExampleParams::defaults());
  EXPECT_TRUE(condition(r, "1").pass);
  EXPECT_FALSE(condition(r, "2").pass);
  EXPECT_FALSE(r.all_pass);
}

TEST(IntervalExample, OrderingRejected) {
  try {
    IntervalExampleParams::create(0.2, 0.6, 0.5, 0.8);
    FAIL();
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.invariant(), "ordering");
  }
  EXPECT_THROW(IntervalExampleParams::create(0.0, 0.3, 0.5, 0.8), InvariantViolation);
  EXPECT_THROW(IntervalExampleParams::from_json(json{{"a", 0.3}, {"c1", 0.2}}), InvariantViolation);
}

TEST(IntervalExample, ParamsJsonRoundTrip) {
  const auto p = IntervalExampleParams::create(0.15, 0.3, 0.5, 0.85);
  const auto q = IntervalExampleParams::from_json(p.to_json());
  EXPECT_EQ(q.a(), 0.15);
  EXPECT_EQ(q.b(), 0.85);
  EXPECT_TRUE(verify_example_conditions(paper_interval_example(q), q).all_pass);
}

TEST(Trapping, InsideIsImmediate) {
  const auto sys = paper_interval_example();
  const auto r = reach_trapping_region(sys, IntervalExampleParams::defaults(), 0.5);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_FALSE(r.generator.has_value());
}

TEST(Trapping, NearZeroUsesExpandingGenerator) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  const oracle::PaperPair ref;
  const double x = 1e-6;
  const auto r = reach_trapping_region(sys, p, x);
  ASSERT_TRUE(r.generator.has_value());
  EXPECT_EQ(*r.generator, 1u);
  std::size_t m = 0;
  for (double y = x; y < p.a(); y = ref.f1(y)) ++m;
  EXPECT_EQ(r.steps, m);
  const double linear = std::log(p.a() / x) / std::log(3.0);
  EXPECT_GE(static_cast<double>(r.steps), linear);
  EXPECT_LE(static_cast<double>(r.steps), linear + 4.0);
}

TEST(Trapping, NearOneUsesF0) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  const oracle::PaperPair ref;
  const double x = 1.0 - 1e-3;
  const auto r = reach_trapping_region(sys, p, x);
  ASSERT_TRUE(r.generator.has_value());
  EXPECT_EQ(*r.generator, 0u);
  std::size_t m = 0;
  double y = x;
  for (; y > p.b(); y = ref.f0(y)) ++m;
  EXPECT_EQ(r.steps, m);
  EXPECT_NEAR(r.point, y, 1e-6);  // f0 is neutral at 1, so pointwise 1e-12 agreement accumulates per step
}

TEST(Trapping, SeededPointsAllReach) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  CounterRng rng(64);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(1e-9, 1.0 - 1e-9);
    const auto r = reach_trapping_region(sys, p, x);
    EXPECT_GE(r.point, p.a());
    EXPECT_LE(r.point, p.b());
  }
}

TEST(Trapping, BudgetExhausted) {
  EXPECT_THROW(reach_trapping_region(paper_interval_example(), IntervalExampleParams::defaults(), 1.0 - 1e-9, 100),
               BudgetExhausted);
}

TEST(StayingBranch, ExpandsAndStays) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  const std::size_t n = 100000;
  const double x = 0.4321;
  const auto w = staying_branch(sys, p, x, n);
  ASSERT_EQ(w.size(), n);
  double y = x, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sys[w.letters[i]].derivative(y);
    ASSERT_GT(d, 1.0);
    s -= std::log(d);
    y = sys[w.letters[i]](y);
    ASSERT_GE(y, p.a());
    ASSERT_LE(y, p.b());
  }
  EXPECT_LE(s / static_cast<double>(n), -std::log(1.1) + 1e-12);
  EXPECT_THROW(staying_branch(sys, p, 0.1, 10), ParameterError);
}

TEST(StayingBranch, CoverSigma) {
  const auto sys = paper_interval_example();
  const auto p = IntervalExampleParams::defaults();
  EXPECT_NEAR(example_cover_sigma(sys, p), 1.0 / 1.05, 1e-9);
  const auto cover = example_cover(p);
  ASSERT_EQ(cover.size(), 2u);
  EXPECT_EQ(cover[0].word.letters, std::vector<std::size_t>{1});
  EXPECT_EQ(cover[1].word.letters, std::vector<std::size_t>{0});
}

TEST(FigureCsv, Rows) {
  std::ostringstream os;
  write_example_figure_csv(os, paper_interval_example(), 11);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,f0,f1");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 11);
}

TEST(CatalogLookup, NamesAndErrors) {
  EXPECT_EQ(catalog_system("doubling", json::object()).size(), 1u);
  EXPECT_DOUBLE_EQ(catalog_system("perturbed", json{{"eps", 0.2}})[0].derivative(0.0), 2.2);
  EXPECT_EQ(catalog_system("mobius-pair", json::object()).size(), 2u);
  EXPECT_FALSE(catalog_system("identity", json{{"domain", "interval"}}).domain().is_circle());
  EXPECT_EQ(catalog_system("paper-interval", json::object()).size(), 2u);
  EXPECT_THROW(catalog_system("tent", json::object()), ParameterError);
}

TEST(Classify, DoublingUniformConstants) {
  ClassifyOptions o;
  o.samples = 20;
  o.horizon = 100;
  o.seed = 65;
  const auto r = classify_action(doubling_system(), o);
  EXPECT_TRUE(r.uniformly_expanding);
  EXPECT_NEAR(r.uniform_C, 1.0, 1e-9);
  EXPECT_NEAR(r.uniform_lambda, 2.0, 1e-9);
}
