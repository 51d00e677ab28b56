#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "expansion_lab/system.hpp"

namespace xlab {

/// Malformed system file; carries the 1-based line/column of a JSON syntax error when known.
class SystemFileError : public ParameterError {
 public:
  SystemFileError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : ParameterError(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Builds a closed-form generator. Families: doubling, perturbed_doubling {eps}, rotation {gamma},
/// identity, linear {k}, circle_sine {degree, shift, eps} (circle); mobius {s}, identity (interval).
/// Without an override the family's exact Hölder data is used.
SmoothMap1D make_family_map(std::string_view family, const json& params, Domain domain,
                            std::optional<HolderData> holder = std::nullopt);

/// Spline generator; a missing Hölder constant is estimated on a grid and inflated by 1.25.
SmoothMap1D make_spline_map(Domain domain, std::vector<double> knots, std::vector<double> values,
                            std::vector<double> derivs, double alpha = 1.0, std::optional<double> holder_const = std::nullopt,
                            double epsilon = 0.25);

/// {domain, mode, generators:[...]} -> system. Every generator passes validate_map.
GeneratorSystem system_from_json(const json& j);
json system_to_json(const GeneratorSystem& system);

GeneratorSystem parse_system_text(std::string_view text);
GeneratorSystem load_system_file(const std::string& path);

}  // namespace xlab
