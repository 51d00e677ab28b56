#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "expansion_lab/catalog.hpp"
#include "expansion_lab/rng.hpp"
#include "expansion_lab/system.hpp"
#include "expansion_lab/system_io.hpp"
#include "oracles.hpp"

using namespace xlab;

namespace {

Word word_of(std::vector<std::size_t> letters) { return Word{std::move(letters), 0}; }

Word random_word(CounterRng& rng, std::size_t d, std::size_t n) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.letters.push_back(rng.below(d));
  return w;
}

}  // namespace

TEST(Domain, CanonicalAndDistance) {
  const Domain circle(DomainKind::Circle), interval(DomainKind::UnitInterval);
  EXPECT_DOUBLE_EQ(circle.canonical(1.25), 0.25);
  EXPECT_DOUBLE_EQ(circle.canonical(-0.25), 0.75);
  EXPECT_EQ(circle.canonical(-1e-18), 0.0);  // would round to 1.0
  EXPECT_EQ(interval.canonical(1.5), 1.0);
  EXPECT_EQ(interval.canonical(-0.5), 0.0);
  EXPECT_NEAR(circle.distance(0.05, 0.95), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(interval.distance(0.05, 0.95), 0.9);
  EXPECT_TRUE(circle.contains(0.0));
  EXPECT_FALSE(circle.contains(1.0));
  EXPECT_TRUE(interval.contains(1.0));
}

TEST(Domain, MetricAxiomsOnRandomTriples) {
  CounterRng rng(11);
  for (const Domain d : {Domain(DomainKind::Circle), Domain(DomainKind::UnitInterval)}) {
    for (int t = 0; t < 2000; ++t) {
      const double x = rng.uniform(), y = rng.uniform(), z = rng.uniform();
      EXPECT_EQ(d.distance(x, y), d.distance(y, x));
      EXPECT_LE(d.distance(x, z), d.distance(x, y) + d.distance(y, z) + 1e-15);
      EXPECT_LE(d.distance(x, y), d.is_circle() ? 0.5 : 1.0);
      EXPECT_EQ(d.distance(x, x), 0.0);
    }
  }
}

TEST(Domain, CanonicalIsIdempotent) {
  CounterRng rng(12);
  const Domain circle(DomainKind::Circle);
  const auto sys = perturbed_doubling(0.5);
  for (int t = 0; t < 1000; ++t) {
    const double y = sys[0](rng.uniform(-3.0, 3.0));
    EXPECT_EQ(circle.canonical(y), y);
    EXPECT_TRUE(circle.contains(y));
  }
}

TEST(ComposeOrbit, DoublingMatchesBinaryShift) {
  const auto sys = doubling_system();
  const auto orbit = compose_orbit(sys, word_of({0, 0, 0}), 0.1, 3);
  ASSERT_EQ(orbit.points.size(), 4u);
  EXPECT_NEAR(orbit.points[1], 0.2, 1e-15);
  EXPECT_NEAR(orbit.points[2], 0.4, 1e-15);
  EXPECT_NEAR(orbit.points[3], 0.8, 1e-15);
  for (double ld : orbit.log_derivs) EXPECT_NEAR(ld, std::log(2.0), 1e-15);
}

TEST(ComposeOrbit, DyadicPointsAreExact) {
  const auto sys = doubling_system();
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(5), 3.0 / 32.0, 5);
  EXPECT_EQ(orbit.points.back(), 0.0);
  EXPECT_EQ(orbit.points[4], 0.5);
}

TEST(ComposeOrbit, ZeroStepsIsTheStartPoint) {
  const auto orbit = compose_orbit(doubling_system(), Word{}, 0.3, 0);
  ASSERT_EQ(orbit.points.size(), 1u);
  EXPECT_EQ(orbit.points[0], 0.3);
  EXPECT_TRUE(orbit.log_derivs.empty());
}

TEST(ComposeOrbit, IntervalExampleMatchesProfileIntegrals) {
  const auto sys = paper_interval_example();
  const oracle::PaperPair ref;
  const Word w = word_of({0, 1, 1, 0, 1, 0, 0, 1, 1, 1});
  const auto orbit = compose_orbit(sys, w, 0.5, 10);
  double x = 0.5;
  for (std::size_t i = 0; i < 10; ++i) {
    const double d = w.letters[i] == 0 ? ref.df0(x) : ref.df1(x);
    EXPECT_NEAR(orbit.log_derivs[i], std::log(d), 1e-12) << "step " << i;
    x = w.letters[i] == 0 ? ref.f0(x) : ref.f1(x);
    EXPECT_NEAR(orbit.points[i + 1], x, 1e-12) << "step " << i;
  }
}

TEST(ComposeOrbit, WordErrors) {
  const auto sys = mobius_pair();
  EXPECT_THROW(compose_orbit(sys, word_of({0, 1}), 0.5, 3), LengthError);
  EXPECT_THROW(compose_orbit(sys, word_of({0, 2}), 0.5, 2), InvalidWord);

  const GeneratorSystem seq(Domain(DomainKind::UnitInterval), mobius_pair().generators(), SystemMode::Sequence);
  EXPECT_NO_THROW(compose_orbit(seq, sequence_word(0, 2), 0.5, 2));
  EXPECT_THROW(compose_orbit(seq, word_of({1, 0}), 0.5, 2), InvalidWord);
  EXPECT_THROW(compose_orbit(seq, word_of({0, 0}), 0.5, 2), InvalidWord);
  EXPECT_THROW(compose_orbit(seq, sequence_word(0, 3), 0.5, 3), InvalidWord);
}

TEST(WordSource, CyclicFixedAndTake) {
  const auto c = WordSource::cyclic({0, 1, 1});
  EXPECT_EQ(c.letter(4), 1u);
  EXPECT_EQ(c.letter(6), 0u);
  EXPECT_FALSE(c.length().has_value());
  EXPECT_EQ(c.take(5).letters, (std::vector<std::size_t>{0, 1, 1, 0, 1}));
  const auto f = WordSource::fixed(word_of({1, 0}));
  EXPECT_EQ(f.length(), 2u);
  EXPECT_THROW(f.letter(2), LengthError);
}

TEST(LogTheta, ClosedForms) {
  EXPECT_NEAR(log_inverse_lipschitz(doubling_system()[0], 0.37), -std::log(2.0), 1e-15);
  EXPECT_EQ(log_inverse_lipschitz(identity_system(Domain(DomainKind::Circle))[0], 0.37), 0.0);
  const auto sine = make_family_map("circle_sine", json{{"degree", 1}, {"shift", 0.0}, {"eps", 0.1}},
                                    Domain(DomainKind::Circle));
  EXPECT_NEAR(log_inverse_lipschitz(sine, 0.0), -std::log(1.1), 1e-15);
  const auto mob = mobius_pair(2.0, 0.5);
  EXPECT_NEAR(log_inverse_lipschitz(mob[0], 0.0), -std::log(2.0), 1e-15);
  EXPECT_NEAR(log_inverse_lipschitz(mob[0], 1.0), std::log(2.0), 1e-15);
}

TEST(LogTheta, ThetaTimesDerivativeIsOne) {
  CounterRng rng(13);
  for (const auto& sys : {perturbed_doubling(0.7), mobius_pair(3.0, 0.25), paper_interval_example()}) {
    for (int t = 0; t < 500; ++t) {
      const double x = rng.uniform();
      for (const auto& f : sys.generators())
        EXPECT_NEAR(std::exp(log_inverse_lipschitz(f, x)) * std::fabs(f.derivative(x)), 1.0, 1e-14);
    }
  }
}

TEST(LogTheta, DegenerateDerivativeRaises) {
  const SmoothMap1D f(std::make_shared<MobiusModel>(1e-310), Domain(DomainKind::UnitInterval), HolderData{});
  EXPECT_THROW(log_inverse_lipschitz(f, 0.0), DerivativeDegenerate);
}

TEST(ChainRule, MatchesFiniteDifferencesOfComposedLift) {
  CounterRng rng(14);
  struct Case {
    GeneratorSystem sys;
    std::size_t max_n;
  };
  const std::vector<Case> cases = {{perturbed_doubling(0.5), 8}, {mobius_pair(1.5, 0.7), 20},
                                   {paper_interval_example(), 20}};
  int checked = 0;
  for (const auto& c : cases) {
    for (int t = 0; t < 34; ++t) {
      const std::size_t n = 1 + rng.below(c.max_n);
      const Word w = random_word(rng, c.sys.size(), n);
      const double x = rng.uniform(0.01, 0.99);
      const double fd = oracle::composed_derivative_fd(c.sys, w.letters, x, n, 1e-7);
      const double chain = std::exp(log_derivative_of_composition(c.sys, w, x, n));
      EXPECT_NEAR(chain / fd, 1.0, 1e-6) << "n=" << n << " x=" << x;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 102);
}

TEST(Birkhoff, DoublingLogThetaSum) {
  const auto sys = doubling_system();
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(100), 0.123, 100);
  const double s = birkhoff_sum(orbit, [&](double x) { return log_inverse_lipschitz(sys[0], x); }, 100);
  EXPECT_NEAR(s, -100.0 * std::log(2.0), 1e-12);
  EXPECT_EQ(birkhoff_sum(orbit, [](double) { return 0.0; }, 100), 0.0);
  EXPECT_THROW(birkhoff_sum(orbit, [](double) { return 0.0; }, 101), LengthError);
}

TEST(Birkhoff, CocycleAdditivity) {
  CounterRng rng(15);
  const std::vector<GeneratorSystem> systems = {perturbed_doubling(0.3), mobius_pair(), paper_interval_example()};
  for (int t = 0; t < 50; ++t) {
    const auto& sys = systems[static_cast<std::size_t>(t) % systems.size()];
    const std::size_t n = 1 + rng.below(40), m = 1 + rng.below(40);
    const Word w = random_word(rng, sys.size(), n + m);
    const double x = rng.uniform();
    const double total = log_derivative_of_composition(sys, w, x, n + m);
    const double head = log_derivative_of_composition(sys, w, x, n);
    const auto orbit = compose_orbit(sys, w, x, n);
    const Word tail{std::vector<std::size_t>(w.letters.begin() + static_cast<long>(n), w.letters.end()), 0};
    const double rest = log_derivative_of_composition(sys, tail, orbit.points.back(), m);
    EXPECT_NEAR(total, head + rest, 1e-10 * (1.0 + std::fabs(total)));
  }
}

TEST(OrbitCsv, RoundTrip) {
  const auto sys = perturbed_doubling(0.4);
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(50), 0.3141, 50);
  std::stringstream ss;
  write_orbit_csv(ss, orbit);
  const auto back = read_orbit_csv(ss);
  ASSERT_EQ(back.points.size(), orbit.points.size());
  ASSERT_EQ(back.log_derivs.size(), orbit.log_derivs.size());
  for (std::size_t i = 0; i < orbit.points.size(); ++i) EXPECT_EQ(back.points[i], orbit.points[i]);
  for (std::size_t i = 0; i < orbit.log_derivs.size(); ++i) EXPECT_EQ(back.log_derivs[i], orbit.log_derivs[i]);
}

TEST(SmoothMap, InverseBranchesRoundTrip) {
  CounterRng rng(16);
  for (const auto& sys : {doubling_system(), perturbed_doubling(0.9), mobius_pair(), paper_interval_example()}) {
    for (const auto& f : sys.generators()) {
      for (int t = 0; t < 200; ++t) {
        const double y = rng.uniform();
        double prev = -1.0;
        for (std::size_t b = 0; b < f.branch_count(); ++b) {
          const double x = f.inverse_branch(y, b);
          EXPECT_GT(x, prev);
          prev = x;
          EXPECT_LT(sys.domain().distance(f(x), y), 1e-13);
        }
      }
    }
  }
}

TEST(SmoothMap, DegreeAndOrientation) {
  EXPECT_EQ(doubling_system()[0].degree(), 2);
  EXPECT_EQ(doubling_system()[0].branch_count(), 2u);
  EXPECT_EQ(rotation_system(0.3)[0].degree(), 1);
  const auto rev = make_family_map("linear", json{{"k", -3}}, Domain(DomainKind::Circle));
  EXPECT_EQ(rev.degree(), -3);
  EXPECT_EQ(rev.orientation(), -1);
  EXPECT_EQ(rev.branch_count(), 3u);
}

TEST(SmoothMap, HolderBoundHoldsOnRandomPairs) {
  CounterRng rng(17);
  for (const auto& sys : {perturbed_doubling(0.6), mobius_pair(4.0, 0.3), paper_interval_example()}) {
    for (const auto& f : sys.generators()) {
      const auto& h = f.holder();
      for (int t = 0; t < 2000; ++t) {
        const double x = rng.uniform();
        const double y = sys.domain().canonical(x + rng.uniform(-h.epsilon, h.epsilon));
        const double d = sys.domain().distance(x, y);
        const double lhs = std::fabs(std::log(std::fabs(f.derivative(x))) - std::log(std::fabs(f.derivative(y))));
        EXPECT_LE(lhs, h.constant * std::pow(d, h.alpha) + 1e-12);
      }
    }
  }
}

TEST(SmoothMap, PerturbedHolderConstantIsExact) {
  const auto f = perturbed_doubling(0.5)[0];
  EXPECT_NEAR(f.holder().constant, 0.5 * oracle::kPi * 2.0 / 1.5, 1e-12);
}

TEST(SmoothMap, ValidateRejectsBrokenSplines) {
  const Domain iv(DomainKind::UnitInterval);
  try {
    make_spline_map(iv, {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, {1.0, 0.0, 1.0});
    FAIL() << "zero knot derivative accepted";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.invariant(), "local_diffeomorphism");
  }
  try {
    make_spline_map(iv, {0.0, 0.5, 1.0}, {0.0, 0.9, 1.0}, {1.0, -1.0, 1.0});
    FAIL() << "non-monotone spline accepted";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.invariant(), "local_diffeomorphism");
  }
  EXPECT_THROW(make_spline_map(iv, {0.0, 0.7, 0.6, 1.0}, {0.0, 0.5, 0.6, 1.0}, {1, 1, 1, 1}), InvariantViolation);
}

TEST(SmoothMap, SplineReproducesCubic) {
  // p(x) = x + x^2 - x^3 / 2 is increasing on [0,1] with p(1) = 1.5; rescaled to end at 1.
  auto p = [](double x) { return (x + x * x - 0.5 * x * x * x) / 1.5; };
  auto dp = [](double x) { return (1.0 + 2.0 * x - 1.5 * x * x) / 1.5; };
  std::vector<double> k, v, d;
  for (int i = 0; i <= 4; ++i) {
    const double x = i / 4.0;
    k.push_back(x);
    v.push_back(p(x));
    d.push_back(dp(x));
  }
  v.front() = 0.0;
  v.back() = 1.0;
  const auto f = make_spline_map(Domain(DomainKind::UnitInterval), k, v, d);
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(f(x), p(x), 1e-14);
    EXPECT_NEAR(f.derivative(x), dp(x), 1e-13);
  }
}

TEST(SmoothMap, CircleSplineDegreeTwo) {
  const auto f = make_spline_map(Domain(DomainKind::Circle), {0.0, 0.5, 1.0}, {0.0, 1.0, 2.0}, {2.0, 2.0, 2.0});
  EXPECT_EQ(f.degree(), 2);
  EXPECT_NEAR(f(0.75), 0.5, 1e-15);
  EXPECT_NEAR(f.lift(1.25) - f.lift(0.25), 2.0, 1e-15);
}

TEST(SystemIo, TextRoundTripPreservesEvaluation) {
  const char* text = R"({
    "domain": "circle",
    "generators": [
      {"family": "perturbed_doubling", "params": {"eps": 0.3}},
      {"family": "rotation", "params": {"gamma": 0.1}},
      {"spline": {"knots": [0, 0.5, 1], "values": [0, 1, 2], "derivs": [2, 2, 2]}}
    ]
  })";
  const auto sys = parse_system_text(text);
  ASSERT_EQ(sys.size(), 3u);
  const auto again = system_from_json(system_to_json(sys));
  CounterRng rng(18);
  for (int t = 0; t < 200; ++t) {
    const double x = rng.uniform();
    for (std::size_t g = 0; g < 3; ++g) {
      EXPECT_EQ(sys[g](x), again[g](x));
      EXPECT_EQ(sys[g].derivative(x), again[g].derivative(x));
    }
  }
  EXPECT_NEAR(sys[1](0.95), 0.05, 1e-15);
}

TEST(SystemIo, MalformedJsonReportsLineAndColumn) {
  try {
    parse_system_text("{\n  \"domain\": \"circle\",\n  \"generators\": [\n    {\"family\": }\n  ]\n}");
    FAIL() << "malformed text accepted";
  } catch (const SystemFileError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_GT(e.column(), 0u);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(SystemIo, StructuralErrors) {
  EXPECT_THROW(parse_system_text("[]"), SystemFileError);
  EXPECT_THROW(parse_system_text(R"({"generators": []})"), SystemFileError);
  EXPECT_THROW(parse_system_text(R"({"domain": "torus", "generators": [{"family": "doubling"}]})"), ParameterError);
  EXPECT_THROW(parse_system_text(R"({"domain": "circle", "generators": [{"family": "tent"}]})"), ParameterError);
  EXPECT_THROW(parse_system_text(R"({"domain": "circle", "generators": [{"family": "mobius", "params": {"s": 2}}]})"),
               ParameterError);
  EXPECT_THROW(
      parse_system_text(R"({"domain": "circle", "generators": [{"family": "perturbed_doubling", "params": {"eps": 1.5}}]})"),
      ParameterError);
  EXPECT_THROW(load_system_file("/nonexistent/system.json"), SystemFileError);
}

TEST(SystemIo, EmptyGeneratorListViolatesInvariant) {
  try {
    parse_system_text(R"({"domain": "circle", "generators": []})");
    FAIL();
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.invariant(), "generator_count");
  } catch (const SystemFileError&) {
    SUCCEED();
  }
}

TEST(Rng, CounterStreamsAreReproducibleAndDistinct) {
  CounterRng a(5, 0), b(5, 0), c(5, 1), d(6, 0);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
    EXPECT_NE(va, d.next_u64());
  }
  CounterRng e(5, 0);
  EXPECT_EQ(e.at(99), CounterRng(5, 0).at(99));
}

TEST(Rng, SplitMixFinalizerReference) {
  // SplitMix64 finalizer applied to the golden-ratio increment (first output of the classic seed-0 stream).
  EXPECT_EQ(CounterRng::mix64(0x9E3779B97F4A7C15ULL), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, UniformMomentsAndBelow) {
  CounterRng rng(19);
  double s = 0, s2 = 0;
  const int n = 200000;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
    ++counts[rng.below(7)];
  }
  EXPECT_NEAR(s / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.005);
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}
