#include "expansion_lab/pliss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xlab {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("sigma must lie in (0,1)");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

LogPhiSequence log_phi_from_orbit(const OrbitRecord& orbit, double inflation) {
  if (!(inflation >= 0.0)) throw ParameterError("inflation margin must be >= 0");
  LogPhiSequence seq;
  seq.values.reserve(orbit.log_derivs.size());
  for (double ld : orbit.log_derivs) seq.values.push_back(-ld + inflation);
  return seq;
}

json to_json(const HyperbolicTimeReport& r) {
  return json{{"sigma", r.sigma},         {"times", r.times},
              {"horizon", r.horizon},     {"density", r.density},
              {"exponent_estimate", r.exponent_estimate}, {"advisory", r.advisory}};
}

bool is_hyperbolic_time(std::span<const double> values, std::size_t n, double sigma) {
  check_sigma(sigma);
  if (n < 1 || n > values.size())
    throw LengthError("hyperbolic time n = " + std::to_string(n) + " outside 1.." + std::to_string(values.size()));
  const double log_sigma = std::log(sigma);
  double s = 0.0;
  for (std::size_t l = 1; l <= n; ++l) {
    s += values[n - l];
    if (s > static_cast<double>(l) * log_sigma + kHyperbolicSlack) return false;
  }
  return true;
}

HyperbolicTimeReport hyperbolic_times_bruteforce(const LogPhiSequence& seq, double sigma) {
  check_sigma(sigma);
  HyperbolicTimeReport r;
  r.sigma = sigma;
  r.horizon = seq.size();
  for (std::size_t n = 1; n <= seq.size(); ++n)
    if (is_hyperbolic_time(seq, n, sigma)) r.times.push_back(n);
  r.density = r.horizon ? static_cast<double>(r.times.size()) / static_cast<double>(r.horizon) : 0.0;
  r.exponent_estimate = mean(seq.values);
  return r;
}

std::vector<std::size_t> pliss_times(std::span<const double> a, double c, double A) {
  if (!(c > 0.0)) throw ParameterError("pliss_times: c must be > 0");
  if (!(A > 0.0)) throw ParameterError("pliss_times: A must be > 0");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > A)
      throw ParameterError("pliss_times: invalid bound, a[" + std::to_string(i) + "] = " + std::to_string(a[i]) +
                           " exceeds A = " + std::to_string(A));
  // n is a Pliss time iff the prefix sum P_n reaches the running maximum of P_0..P_{n-1}.
  std::vector<std::size_t> times;
  double prefix = 0.0, running_max = 0.0;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    prefix += a[n - 1];
    if (prefix >= running_max) {
      times.push_back(n);
      running_max = prefix;
    }
  }
  return times;
}

HyperbolicTimeReport hyperbolic_times(const LogPhiSequence& seq, double a) {
  if (!(a > 0.0)) throw ParameterError("hyperbolic_times: a must be > 0");
  const double c = 0.5 * a;
  std::vector<double> shifted(seq.values.size());
  double sup = -std::numeric_limits<double>::infinity(), total = 0.0;
  for (std::size_t i = 0; i < seq.values.size(); ++i) {
    shifted[i] = -seq.values[i] - c;
    sup = std::max(sup, shifted[i]);
    total -= seq.values[i];
  }
  HyperbolicTimeReport r;
  r.sigma = std::exp(-c);
  r.horizon = seq.size();
  r.exponent_estimate = mean(seq.values);
  r.advisory = seq.size() == 0 || total < a * static_cast<double>(seq.size());
  r.times = pliss_times(shifted, c, std::max(sup, c));
  r.density = r.horizon ? static_cast<double>(r.times.size()) / static_cast<double>(r.horizon) : 0.0;
  return r;
}

double expansion_exponent(const LogPhiSequence& seq, std::size_t window) {
  const std::size_t n = seq.size();
  if (n == 0) throw LengthError("expansion_exponent: empty sequence");
  if (window == 0 || window > n) throw LengthError("expansion_exponent: window must lie in 1..N");
  const std::size_t first = n >= 2 * window ? n - 2 * window : 0;
  double s = 0.0;
  for (std::size_t i = first; i < first + window; ++i) s += seq.values[i];
  double best = s;
  for (std::size_t start = first + 1; start + window <= n; ++start) {
    s += seq.values[start + window - 1] - seq.values[start - 1];
    best = std::max(best, s);
  }
  return best / static_cast<double>(window);
}

double expansion_exponent(const LogPhiSequence& seq) {
  return expansion_exponent(seq, std::max<std::size_t>(1, (seq.size() + 3) / 4));
}

}  // namespace xlab
