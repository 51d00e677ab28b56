#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "expansion_lab/system.hpp"

namespace xlab {

/// values[i] = log phi at the i-th orbit point, phi the local inverse Lipschitz constant.
struct LogPhiSequence {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Pointwise mode uses log theta = -log|f'| along the orbit; a positive margin `inflation`
/// emulates the uniform constant phi of a neighbourhood.
LogPhiSequence log_phi_from_orbit(const OrbitRecord& orbit, double inflation = 0.0);

/// Absolute slack of the log-domain comparison in the hyperbolic-time test.
inline constexpr double kHyperbolicSlack = 1e-12;

struct HyperbolicTimeReport {
  double sigma = 0.0;
  std::vector<std::size_t> times;  // sorted, 1-based
  std::size_t horizon = 0;
  double density = 0.0;            // times.size() / horizon
  double exponent_estimate = 0.0;  // mean of values
  bool advisory = false;           // the averaging hypothesis failed at this horizon
};

json to_json(const HyperbolicTimeReport& report);

/// n is sigma-hyperbolic iff sum_{i=n-l}^{n-1} values[i] <= l log(sigma) for l = 1..n.
bool is_hyperbolic_time(std::span<const double> values, std::size_t n, double sigma);
inline bool is_hyperbolic_time(const LogPhiSequence& seq, std::size_t n, double sigma) {
  return is_hyperbolic_time(std::span<const double>(seq.values), n, sigma);
}

/// Every sigma-hyperbolic time, by direct quadratic scan.
HyperbolicTimeReport hyperbolic_times_bruteforce(const LogPhiSequence& seq, double sigma);

/// Indices 1 <= n_1 < ... < n_t <= N with sum_{i=m}^{n_j-1} a_i >= 0 for every m < n_j.
/// When sum a_i >= cN and a_i <= A, at least (c/A) N indices are returned.
std::vector<std::size_t> pliss_times(std::span<const double> a, double c, double A);

/// sigma = exp(-a/2) hyperbolic times extracted through the Pliss argument.
HyperbolicTimeReport hyperbolic_times(const LogPhiSequence& seq, double a);

/// Finite-horizon proxy for limsup of the Birkhoff averages: the largest average over a window of
/// `window` consecutive values starting in the tail [N - 2 window, N - window]. An estimate only.
double expansion_exponent(const LogPhiSequence& seq, std::size_t window);
double expansion_exponent(const LogPhiSequence& seq);  // window = ceil(N/4)

}  // namespace xlab
