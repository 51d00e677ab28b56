#pragma once

#include <cmath>
#include <string_view>

namespace xlab {

enum class DomainKind { Circle, UnitInterval };

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

/// The phase space: the circle R/Z or the unit interval [0,1], both with Lebesgue measure.
class Domain {
 public:
  constexpr explicit Domain(DomainKind kind = DomainKind::Circle) : kind_(kind) {}

  constexpr DomainKind kind() const { return kind_; }
  constexpr bool is_circle() const { return kind_ == DomainKind::Circle; }

  /// Circle points are reduced to [0,1); interval points are clamped to [0,1].
  double canonical(double x) const {
    if (kind_ == DomainKind::Circle) {
      double r = x - std::floor(x);
      return r >= 1.0 ? 0.0 : r;
    }
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
  }

  double distance(double x, double y) const { return offset_length(canonical(x) - canonical(y)); }

  /// Metric length of a displacement: min(|d|, 1-|d|) on the circle (after reduction), |d| otherwise.
  double offset_length(double d) const {
    double a = std::fabs(d);
    if (kind_ == DomainKind::Circle) {
      a -= std::floor(a);
      return a > 0.5 ? 1.0 - a : a;
    }
    return a;
  }

  bool contains(double x) const {
    return kind_ == DomainKind::Circle ? (x >= 0.0 && x < 1.0) : (x >= 0.0 && x <= 1.0);
  }

  friend constexpr bool operator==(Domain, Domain) = default;

 private:
  DomainKind kind_;
};

}  // namespace xlab
