#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "expansion_lab/smooth_map.hpp"

namespace xlab {

/// Semigroup: words index generators freely. Sequence: generator i is the i-th map of a
/// non-autonomous system, so the letter at step i must equal start_state + i.
enum class SystemMode { Semigroup, Sequence };

std::string_view to_string(SystemMode mode);
SystemMode system_mode_from_string(std::string_view name);

/// Finitely many generators over a common domain.
class GeneratorSystem {
 public:
  GeneratorSystem(Domain domain, std::vector<SmoothMap1D> generators, SystemMode mode = SystemMode::Semigroup);

  Domain domain() const { return domain_; }
  SystemMode mode() const { return mode_; }
  std::size_t size() const { return generators_.size(); }
  const SmoothMap1D& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<SmoothMap1D>& generators() const { return generators_; }

  /// Largest Hölder constant and smallest exponent / locality scale over the generators.
  HolderData holder() const;

 private:
  Domain domain_;
  std::vector<SmoothMap1D> generators_;
  SystemMode mode_;
};

/// A finite word over generator indices 0..d-1. Letter i is applied at step i, so the composed
/// map of length n is f_{w[n-1]} o ... o f_{w[0]}.
struct Word {
  std::vector<std::size_t> letters;
  std::size_t start_state = 0;

  std::size_t size() const { return letters.size(); }
  friend bool operator==(const Word&, const Word&) = default;
};

/// The word of length n forced by Sequence mode (start_state, start_state+1, ...).
Word sequence_word(std::size_t start_state, std::size_t n);

/// Checks the first n letters against the system; throws LengthError / InvalidWord.
void check_word(const GeneratorSystem& system, const Word& word, std::size_t n);

/// Lazily extensible word: an explicit prefix or a cyclic pattern.
class WordSource {
 public:
  static WordSource cyclic(std::vector<std::size_t> pattern);
  static WordSource constant(std::size_t letter) { return cyclic({letter}); }
  static WordSource fixed(Word word);

  /// Letter applied at step i; throws LengthError past the end of a fixed word.
  std::size_t letter(std::size_t i) const;
  std::optional<std::size_t> length() const;
  Word take(std::size_t n) const;

 private:
  std::vector<std::size_t> letters_;
  bool cyclic_ = true;
};

/// The orbit x_i = f^i(x0) for i = 0..n with the per-step log-derivatives log|f'_{w_i}(x_i)|.
struct OrbitRecord {
  double x0 = 0.0;
  Word word;
  std::vector<double> points;
  std::vector<double> log_derivs;

  std::size_t length() const { return log_derivs.size(); }
};

OrbitRecord compose_orbit(const GeneratorSystem& system, const Word& word, double x0, std::size_t n);

/// Sum of observable(x_i) for i < n.
double birkhoff_sum(const OrbitRecord& orbit, const std::function<double(double)>& observable, std::size_t n);

/// log theta(x) = -log|f'(x)|.
double log_inverse_lipschitz(const SmoothMap1D& map, double x);

/// log|(f^n)'(x0)| along `word`, evaluated step by step.
double log_derivative_of_composition(const GeneratorSystem& system, const Word& word, double x0, std::size_t n);

/// CSV with columns step,x,log_deriv (the last row carries an empty log_deriv).
void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit);
/// Parses the CSV written by write_orbit_csv; returns points and log-derivatives.
OrbitRecord read_orbit_csv(std::istream& is);

}  // namespace xlab
