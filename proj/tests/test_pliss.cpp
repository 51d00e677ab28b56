#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "expansion_lab/catalog.hpp"
#include "expansion_lab/pliss.hpp"
#include "expansion_lab/rng.hpp"
#include "oracles.hpp"

using namespace xlab;

namespace {

LogPhiSequence constant_seq(double v, std::size_t n) { return {std::vector<double>(n, v)}; }

LogPhiSequence random_seq(CounterRng& rng, std::size_t n, double lo, double hi) {
  LogPhiSequence s;
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(rng.uniform(lo, hi));
  return s;
}

bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(HyperbolicTime, DefinitionExamples) {
  const auto half = constant_seq(std::log(0.5), 6);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_TRUE(is_hyperbolic_time(half, n, 0.5));
  EXPECT_FALSE(is_hyperbolic_time(half, 1, 0.25));
  const LogPhiSequence two{{std::log(2.0), std::log(0.125)}};
  EXPECT_TRUE(is_hyperbolic_time(two, 2, 0.5));
  EXPECT_FALSE(is_hyperbolic_time(two, 1, 0.5));
}

TEST(HyperbolicTime, InputValidation) {
  const auto s = constant_seq(-1.0, 4);
  EXPECT_THROW(is_hyperbolic_time(s, 0, 0.5), LengthError);
  EXPECT_THROW(is_hyperbolic_time(s, 5, 0.5), LengthError);
  EXPECT_THROW(is_hyperbolic_time(s, 1, 1.0), ParameterError);
  EXPECT_THROW(is_hyperbolic_time(s, 1, 0.0), ParameterError);
}

TEST(HyperbolicTime, AgreesWithProductDefinition) {
  CounterRng rng(21);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_seq(rng, 30, -1.0, 0.5);
    const double sigma = rng.uniform(0.3, 0.95);
    for (std::size_t n = 1; n <= 30; ++n)
      EXPECT_EQ(is_hyperbolic_time(s, n, sigma), oracle::hyperbolic_by_products(s.values, n, sigma));
  }
}

TEST(Bruteforce, ConstantAndContractingSequences) {
  const auto r = hyperbolic_times_bruteforce(constant_seq(std::log(0.5), 10), 0.5);
  EXPECT_EQ(r.times, (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_DOUBLE_EQ(r.density, 1.0);
  EXPECT_TRUE(hyperbolic_times_bruteforce(constant_seq(std::log(2.0), 10), 0.9).times.empty());
}

TEST(Bruteforce, MatchesPlissDetectorOnRandomSequences) {
  CounterRng rng(22);
  const double sigma = std::exp(-0.2);
  for (int t = 0; t < 1000; ++t) {
    const auto s = random_seq(rng, 500, -1.0, 0.5);
    const auto brute = hyperbolic_times_bruteforce(s, sigma);
    const auto pliss = hyperbolic_times(s, -2.0 * std::log(sigma));
    ASSERT_NEAR(pliss.sigma, sigma, 1e-15);
    ASSERT_EQ(pliss.times, brute.times) << "trial " << t;
  }
}

TEST(PlissTimes, AllOnes) {
  const std::vector<double> a(25, 1.0);
  const auto t = pliss_times(a, 1.0, 1.0);
  ASSERT_EQ(t.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(t[i], i + 1);
}

TEST(PlissTimes, AlternatingAgainstDefinitionScan) {
  std::vector<double> a;
  for (int i = 0; i < 40; ++i) a.push_back(i % 2 == 0 ? -1.0 : 3.0);
  const auto t = pliss_times(a, 1.0, 3.0);
  EXPECT_EQ(t, oracle::backward_nonnegative(a));
  for (std::size_t n : t) EXPECT_EQ(n % 2, 0u);  // only right after a 3
}

TEST(PlissTimes, RandomSequencesIndexByIndex) {
  CounterRng rng(23);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> a;
    for (int i = 0; i < 200; ++i) a.push_back(rng.uniform(-1.0, 1.0));
    EXPECT_EQ(pliss_times(a, 0.1, 1.0), oracle::backward_nonnegative(a));
  }
}

TEST(PlissTimes, DensityBoundOverTrials) {
  CounterRng rng(24);
  const double c = 0.5, A = 1.5;
  int applicable = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a;
    double sum = 0.0;
    const std::size_t N = 400;
    for (std::size_t i = 0; i < N; ++i) {
      a.push_back(rng.uniform(-0.5, 1.5));
      sum += a.back();
    }
    const auto times = pliss_times(a, c, A);
    if (sum >= c * static_cast<double>(N)) {
      ++applicable;
      // count * A >= c * N with c/A = 1/3: compare in integers.
      EXPECT_GE(3 * times.size(), N);
    }
  }
  EXPECT_GT(applicable, 50);
}

TEST(PlissTimes, DensityBoundExactCaseWithIntegerData) {
  CounterRng rng(25);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a;
    long sum = 0;
    const std::size_t N = 60;
    for (std::size_t i = 0; i < N; ++i) {
      const long v = static_cast<long>(rng.below(5)) - 1;  // -1..3
      a.push_back(static_cast<double>(v));
      sum += v;
    }
    const long c = 1, A = 3;
    const auto times = pliss_times(a, static_cast<double>(c), static_cast<double>(A));
    if (sum >= c * static_cast<long>(N)) EXPECT_GE(A * static_cast<long>(times.size()), c * static_cast<long>(N));
  }
}

TEST(PlissTimes, InvalidBound) {
  const std::vector<double> a = {0.5, 2.0};
  EXPECT_THROW(pliss_times(a, 0.1, 1.0), ParameterError);
}

TEST(HyperbolicTimes, DoublingEveryTime) {
  const auto sys = doubling_system();
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(200), 0.3, 200);
  const auto seq = log_phi_from_orbit(orbit);
  const auto r = hyperbolic_times(seq, std::log(2.0));
  EXPECT_EQ(r.times.size(), 200u);
  EXPECT_FALSE(r.advisory);
  EXPECT_NEAR(r.sigma, std::pow(2.0, -0.5), 1e-15);
  EXPECT_NEAR(r.exponent_estimate, -std::log(2.0), 1e-14);
  EXPECT_TRUE(hyperbolic_times(seq, 2.0 * std::log(2.0) + 0.1).advisory);
}

TEST(HyperbolicTimes, PerturbedDoublingSubsetOfBruteforce) {
  const auto sys = perturbed_doubling(0.5);
  const std::size_t n = 10000;
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(n), 0.1234567, n);
  const auto seq = log_phi_from_orbit(orbit);
  const auto r = hyperbolic_times(seq, 0.5);
  const auto brute = hyperbolic_times_bruteforce(seq, r.sigma);
  EXPECT_TRUE(is_subset(r.times, brute.times));
  EXPECT_FALSE(r.times.empty());
  for (std::size_t t : r.times) EXPECT_TRUE(is_hyperbolic_time(seq, t, r.sigma));
}

TEST(HyperbolicTimes, RejectsNonPositiveA) {
  EXPECT_THROW(hyperbolic_times(constant_seq(-1.0, 5), 0.0), ParameterError);
}

TEST(HyperbolicTimes, InflationRemovesTimes) {
  const auto sys = perturbed_doubling(0.5);
  const auto orbit = compose_orbit(sys, WordSource::constant(0).take(500), 0.77, 500);
  const auto plain = hyperbolic_times_bruteforce(log_phi_from_orbit(orbit), 0.6);
  const auto inflated = hyperbolic_times_bruteforce(log_phi_from_orbit(orbit, 0.1), 0.6);
  EXPECT_TRUE(is_subset(inflated.times, plain.times));
}

TEST(HyperbolicTimes, ShrinkingSigmaNeverAddsTimes) {
  CounterRng rng(26);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_seq(rng, 200, -1.0, 0.5);
    const double s1 = rng.uniform(0.5, 0.99), s2 = s1 * rng.uniform(0.5, 1.0);
    EXPECT_TRUE(is_subset(hyperbolic_times_bruteforce(s, s2).times, hyperbolic_times_bruteforce(s, s1).times));
  }
}

TEST(HyperbolicTimes, ReportedTimesRecheck) {
  CounterRng rng(27);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_seq(rng, 300, -1.0, 0.4);
    const auto r = hyperbolic_times(s, rng.uniform(0.05, 0.6));
    for (std::size_t n : r.times) EXPECT_TRUE(is_hyperbolic_time(s, n, r.sigma));
    EXPECT_GE(r.density, 0.0);
    EXPECT_LE(r.density, 1.0);
  }
}

TEST(ExpansionExponent, Examples) {
  EXPECT_NEAR(expansion_exponent(constant_seq(std::log(0.5), 40), 7), -std::log(2.0), 1e-15);
  EXPECT_NEAR(expansion_exponent(constant_seq(std::log(0.5), 40)), -std::log(2.0), 1e-15);
  LogPhiSequence alt;
  for (int i = 0; i < 40; ++i) alt.values.push_back(i % 2 == 0 ? std::log(2.0) : -3.0 * std::log(2.0));
  EXPECT_NEAR(expansion_exponent(alt, 20), -std::log(2.0), 1e-14);
  EXPECT_GE(expansion_exponent(constant_seq(std::log(2.0), 40)), 0.0);
  EXPECT_THROW(expansion_exponent(LogPhiSequence{}), LengthError);
  EXPECT_THROW(expansion_exponent(constant_seq(0.0, 3), 4), LengthError);
}

TEST(ExpansionExponent, IsMaxOfTailWindowAverages) {
  CounterRng rng(28);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_seq(rng, 97, -1.0, 0.5);
    const std::size_t w = 1 + rng.below(40);
    double best = -1e300;
    const std::size_t n = s.size();
    const std::size_t first = n >= 2 * w ? n - 2 * w : 0;
    for (std::size_t st = first; st + w <= n && st <= n - w; ++st) {
      double sum = 0.0;
      for (std::size_t i = st; i < st + w; ++i) sum += s.values[i];
      best = std::max(best, sum / static_cast<double>(w));
    }
    EXPECT_NEAR(expansion_exponent(s, w), best, 1e-12);
  }
}
