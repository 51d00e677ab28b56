#include "expansion_lab/system.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace xlab {

std::string_view to_string(SystemMode mode) { return mode == SystemMode::Semigroup ? "semigroup" : "sequence"; }

SystemMode system_mode_from_string(std::string_view name) {
  if (name == "semigroup") return SystemMode::Semigroup;
  if (name == "sequence") return SystemMode::Sequence;
  throw ParameterError("unknown mode '" + std::string(name) + "' (expected semigroup|sequence)");
}

GeneratorSystem::GeneratorSystem(Domain domain, std::vector<SmoothMap1D> generators, SystemMode mode)
    : domain_(domain), generators_(std::move(generators)), mode_(mode) {
  if (generators_.empty()) throw InvariantViolation("generator_count", "a system needs at least one generator");
  for (std::size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].domain() != domain_)
      throw InvariantViolation("common_domain", "generator " + std::to_string(i) + " lives on another domain");
}

HolderData GeneratorSystem::holder() const {
  HolderData h = generators_.front().holder();
  for (const auto& g : generators_) {
    h.alpha = std::min(h.alpha, g.holder().alpha);
    h.constant = std::max(h.constant, g.holder().constant);
    h.epsilon = std::min(h.epsilon, g.holder().epsilon);
  }
  return h;
}

Word sequence_word(std::size_t start_state, std::size_t n) {
  Word w;
  w.start_state = start_state;
  w.letters.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.letters[i] = start_state + i;
  return w;
}

void check_word(const GeneratorSystem& system, const Word& word, std::size_t n) {
  if (n > word.size())
    throw LengthError("word of length " + std::to_string(word.size()) + " is shorter than n = " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t letter = word.letters[i];
    if (letter >= system.size())
      throw InvalidWord("letter " + std::to_string(letter) + " at position " + std::to_string(i) +
                        " is not a generator index (d = " + std::to_string(system.size()) + ")");
    if (system.mode() == SystemMode::Sequence && letter != word.start_state + i)
      throw InvalidWord("sequence mode requires letter " + std::to_string(word.start_state + i) + " at position " +
                        std::to_string(i));
  }
}

WordSource WordSource::cyclic(std::vector<std::size_t> pattern) {
  if (pattern.empty()) throw ParameterError("cyclic word pattern must be nonempty");
  WordSource s;
  s.letters_ = std::move(pattern);
  s.cyclic_ = true;
  return s;
}

WordSource WordSource::fixed(Word word) {
  WordSource s;
  s.letters_ = std::move(word.letters);
  s.cyclic_ = false;
  return s;
}

std::size_t WordSource::letter(std::size_t i) const {
  if (cyclic_) return letters_[i % letters_.size()];
  if (i >= letters_.size()) throw LengthError("word budget exhausted at step " + std::to_string(i));
  return letters_[i];
}

std::optional<std::size_t> WordSource::length() const {
  if (cyclic_) return std::nullopt;
  return letters_.size();
}

Word WordSource::take(std::size_t n) const {
  Word w;
  w.letters.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.letters.push_back(letter(i));
  return w;
}

OrbitRecord compose_orbit(const GeneratorSystem& system, const Word& word, double x0, std::size_t n) {
  check_word(system, word, n);
  const Domain dom = system.domain();
  if (!dom.contains(x0)) throw ParameterError("x0 is outside the domain");
  OrbitRecord orbit;
  orbit.x0 = x0;
  orbit.word = word;
  orbit.points.reserve(n + 1);
  orbit.log_derivs.reserve(n);
  double x = x0;
  orbit.points.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    const SmoothMap1D& f = system[word.letters[i]];
    orbit.log_derivs.push_back(std::log(std::fabs(f.derivative(x))));
    x = f(x);
    orbit.points.push_back(x);
  }
  return orbit;
}

double birkhoff_sum(const OrbitRecord& orbit, const std::function<double(double)>& observable, std::size_t n) {
  if (n > orbit.length())
    throw LengthError("birkhoff_sum: n = " + std::to_string(n) + " exceeds orbit length " +
                      std::to_string(orbit.length()));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += observable(orbit.points[i]);
  return s;
}

double log_inverse_lipschitz(const SmoothMap1D& map, double x) {
  const double d = std::fabs(map.derivative(x));
  if (!(d >= 1e-300)) throw DerivativeDegenerate("|f'(x)| below 1e-300");
  return -std::log(d);
}

double log_derivative_of_composition(const GeneratorSystem& system, const Word& word, double x0, std::size_t n) {
  check_word(system, word, n);
  double x = x0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SmoothMap1D& f = system[word.letters[i]];
    s += std::log(std::fabs(f.derivative(x)));
    x = f(x);
  }
  return s;
}

void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit) {
  os << "step,x,log_deriv\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < orbit.points.size(); ++i) {
    os << i << ',' << orbit.points[i] << ',';
    if (i < orbit.log_derivs.size()) os << orbit.log_derivs[i];
    os << '\n';
  }
}

OrbitRecord read_orbit_csv(std::istream& is) {
  OrbitRecord orbit;
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("orbit CSV is empty");
  if (line.rfind("step,x,log_deriv", 0) != 0) throw ParameterError("orbit CSV header must be step,x,log_deriv");
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string step, x, ld;
    std::getline(ss, step, ',');
    std::getline(ss, x, ',');
    std::getline(ss, ld, ',');
    try {
      orbit.points.push_back(std::stod(x));
      if (!ld.empty() && ld != "\r") orbit.log_derivs.push_back(std::stod(ld));
    } catch (const std::exception&) {
      throw ParameterError("orbit CSV: malformed row " + std::to_string(row));
    }
  }
  if (orbit.points.empty()) throw ParameterError("orbit CSV has no rows");
  orbit.x0 = orbit.points.front();
  return orbit;
}

}  // namespace xlab
