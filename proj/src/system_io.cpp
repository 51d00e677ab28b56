#include "expansion_lab/system_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace xlab {

namespace {

constexpr double kDefaultEpsilon = 0.25;

double param(const json& params, const char* key, std::optional<double> fallback = std::nullopt) {
  if (params.is_object() && params.contains(key)) {
    if (!params[key].is_number()) throw ParameterError(std::string("parameter '") + key + "' must be a number");
    return params[key].get<double>();
  }
  if (fallback) return *fallback;
  throw ParameterError(std::string("missing parameter '") + key + "'");
}

void require_circle(std::string_view family, Domain domain) {
  if (!domain.is_circle()) throw ParameterError("family '" + std::string(family) + "' lives on the circle");
}

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ParameterError(std::string("spline needs an array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ParameterError(std::string("spline '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

SmoothMap1D make_family_map(std::string_view family, const json& params, Domain domain,
                            std::optional<HolderData> holder) {
  const std::string name(family);
  auto circle_sine = [&](int k, double shift, double eps, json p) {
    require_circle(family, domain);
    auto model = std::make_shared<CircleSineModel>(k, shift, eps, name, std::move(p));
    HolderData h{1.0, model->log_derivative_lipschitz(), kDefaultEpsilon};
    return SmoothMap1D(model, domain, holder.value_or(h));
  };

  if (name == "doubling") return circle_sine(2, 0.0, 0.0, json::object());
  if (name == "perturbed_doubling") {
    const double eps = param(params, "eps");
    if (!(std::fabs(eps) < 1.0)) throw ParameterError("perturbed_doubling: |eps| must be < 1");
    return circle_sine(2, 0.0, eps, json{{"eps", eps}});
  }
  if (name == "rotation") {
    const double gamma = param(params, "gamma");
    return circle_sine(1, gamma, 0.0, json{{"gamma", gamma}});
  }
  if (name == "linear") {
    const double k = param(params, "k");
    if (k != std::round(k) || k == 0.0) throw ParameterError("linear: k must be a nonzero integer");
    return circle_sine(static_cast<int>(k), 0.0, 0.0, json{{"k", k}});
  }
  if (name == "circle_sine") {
    const double k = param(params, "degree");
    if (k != std::round(k)) throw ParameterError("circle_sine: degree must be an integer");
    const double shift = param(params, "shift", 0.0), eps = param(params, "eps", 0.0);
    return circle_sine(static_cast<int>(k), shift, eps, json{{"degree", k}, {"shift", shift}, {"eps", eps}});
  }
  if (name == "identity") {
    if (domain.is_circle()) return circle_sine(1, 0.0, 0.0, json::object());
    auto model = std::make_shared<MobiusModel>(1.0, "identity");
    return SmoothMap1D(model, domain, holder.value_or(HolderData{1.0, 0.0, kDefaultEpsilon}));
  }
  if (name == "mobius") {
    if (domain.is_circle()) throw ParameterError("family 'mobius' lives on the interval");
    auto model = std::make_shared<MobiusModel>(param(params, "s"));
    HolderData h{1.0, model->log_derivative_lipschitz(), kDefaultEpsilon};
    return SmoothMap1D(model, domain, holder.value_or(h));
  }
  throw ParameterError("unknown map family '" + name + "'");
}

SmoothMap1D make_spline_map(Domain domain, std::vector<double> knots, std::vector<double> values,
                            std::vector<double> derivs, double alpha, std::optional<double> holder_const,
                            double epsilon) {
  auto model = std::make_shared<SplineModel>(domain, std::move(knots), std::move(values), std::move(derivs));
  if (holder_const) return SmoothMap1D(model, domain, HolderData{alpha, *holder_const, epsilon});
  SmoothMap1D provisional(model, domain, HolderData{alpha, 0.0, epsilon});
  return SmoothMap1D(model, domain, HolderData{alpha, estimate_holder_constant(provisional, alpha, epsilon), epsilon});
}

GeneratorSystem system_from_json(const json& j) {
  if (!j.is_object()) throw SystemFileError("system file must hold a JSON object");
  if (!j.contains("domain") || !j["domain"].is_string()) throw SystemFileError("system file needs a string 'domain'");
  const Domain domain(domain_kind_from_string(j["domain"].get<std::string>()));
  SystemMode mode = SystemMode::Semigroup;
  if (j.contains("mode")) mode = system_mode_from_string(j["mode"].get<std::string>());
  if (!j.contains("generators") || !j["generators"].is_array())
    throw SystemFileError("system file needs an array 'generators'");

  std::vector<SmoothMap1D> gens;
  for (const auto& g : j["generators"]) {
    if (!g.is_object()) throw SystemFileError("each generator must be an object");
    const double alpha = g.value("alpha", 1.0);
    const double epsilon = g.value("epsilon", kDefaultEpsilon);
    std::optional<double> holder_const;
    if (g.contains("holder_const")) holder_const = g["holder_const"].get<double>();

    if (g.contains("spline")) {
      const json& s = g["spline"];
      gens.push_back(make_spline_map(domain, number_array(s, "knots"), number_array(s, "values"),
                                     number_array(s, "derivs"), alpha, holder_const, epsilon));
    } else if (g.contains("family")) {
      std::optional<HolderData> h;
      if (holder_const) h = HolderData{alpha, *holder_const, epsilon};
      gens.push_back(make_family_map(g["family"].get<std::string>(), g.value("params", json::object()), domain, h));
    } else {
      throw SystemFileError("generator needs either 'family' or 'spline'");
    }
    validate_map(gens.back());
  }
  return GeneratorSystem(domain, std::move(gens), mode);
}

json system_to_json(const GeneratorSystem& system) {
  json gens = json::array();
  for (const auto& g : system.generators()) gens.push_back(g.to_json());
  return json{{"domain", to_string(system.domain().kind())}, {"mode", to_string(system.mode())}, {"generators", gens}};
}

GeneratorSystem parse_system_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SystemFileError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                              ": " + e.what(),
                          line, col);
  }
  try {
    return system_from_json(j);
  } catch (const json::exception& e) {
    throw SystemFileError(std::string("invalid system file: ") + e.what());
  }
}

GeneratorSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SystemFileError("cannot open system file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system_text(ss.str());
}

}  // namespace xlab
