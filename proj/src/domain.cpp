#include "expansion_lab/domain.hpp"

#include <string>

#include "expansion_lab/errors.hpp"

namespace xlab {

std::string_view to_string(DomainKind kind) {
  return kind == DomainKind::Circle ? "circle" : "interval";
}

DomainKind domain_kind_from_string(std::string_view name) {
  if (name == "circle") return DomainKind::Circle;
  if (name == "interval") return DomainKind::UnitInterval;
  throw ParameterError("unknown domain '" + std::string(name) + "' (expected circle|interval)");
}

}  // namespace xlab
