#include "expansion_lab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "expansion_lab/catalog.hpp"
#include "expansion_lab/classify.hpp"
#include "expansion_lab/ergodicity.hpp"
#include "expansion_lab/pliss.hpp"
#include "expansion_lab/preball.hpp"
#include "expansion_lab/rng.hpp"
#include "expansion_lab/system_io.hpp"

namespace xlab {

namespace {

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json:
      return "json";
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Both:
      return "both";
  }
  return "json";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t parse_index(const std::string& s) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') throw ParameterError("'" + s + "' is not a generator index");
  return v;
}

std::vector<std::size_t> parse_indices(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_index(item));
  if (out.empty()) throw ParameterError("empty letter list");
  return out;
}

/// Word specs: "0,1,1" (fixed), "cyclic:0,1", "greedy", "beam:k", "exhaustive:d", "sequence".
Word resolve_word(const GeneratorSystem& system, const std::string& spec, double x, std::size_t n) {
  if (spec == "sequence" || (spec.empty() && system.mode() == SystemMode::Sequence)) return sequence_word(0, n);
  if (spec.empty()) return WordSource::constant(0).take(n);
  if (spec.rfind("cyclic:", 0) == 0) return WordSource::cyclic(parse_indices(spec.substr(7))).take(n);
  if (spec == "greedy" || spec.rfind("beam", 0) == 0 || spec.rfind("exhaustive", 0) == 0) {
    if (n == 0) return Word{};
    return search_expanding_branch(system, x, n, SearchStrategy::parse(spec)).word;
  }
  Word w{parse_indices(spec), 0};
  if (w.size() < n) throw LengthError("word has " + std::to_string(w.size()) + " letters, need " + std::to_string(n));
  w.letters.resize(n);
  return w;
}

json header(const RunConfig& cfg) {
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"rng", CounterRng::kName},
              {"command", cfg.subcommand},
              {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
              {"system", cfg.system_path.empty() ? json(nullptr) : json(cfg.system_path)},
              {"parameters", cfg.params}};
}

struct Artifacts {
  json report;
  std::string csv;  // empty when the command has no tabular output
  bool pass = true;
  json top_level = json::object();  // merged into the document root
};

void emit(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  json doc = header(cfg);
  doc["verdict"] = art.pass ? "pass" : "fail";
  doc["report"] = art.report;
  doc.update(art.top_level);
  const std::string text = doc.dump(2) + "\n";
  const bool want_json = cfg.format != OutputFormat::Csv;
  const bool want_csv = cfg.format != OutputFormat::Json && !art.csv.empty();
  if (cfg.out_dir.empty()) {
    if (want_json) out << text;
    if (want_csv) out << art.csv;
    return;
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::string stem = cfg.subcommand;
  std::replace(stem.begin(), stem.end(), ' ', '_');
  const auto base = std::filesystem::path(cfg.out_dir) / stem;
  if (want_json) std::ofstream(base.string() + ".json") << text;
  if (want_csv) std::ofstream(base.string() + ".csv") << art.csv;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ParameterError("--seed is required for '" + cfg.subcommand + "'");
  return *cfg.seed;
}

GeneratorSystem require_system(const RunConfig& cfg) {
  if (cfg.system_path.empty()) throw ParameterError("--system is required for '" + cfg.subcommand + "'");
  return load_system_file(cfg.system_path);
}

// ---------------------------------------------------------------------------

Artifacts cmd_simulate(const RunConfig& cfg) {
  const GeneratorSystem system = require_system(cfg);
  const json& p = cfg.params;
  const double x0 = system.domain().canonical(p["x0"].get<double>());
  const std::size_t n = p["n"];
  const Word w = resolve_word(system, p["word"], x0, n);
  const OrbitRecord orbit = compose_orbit(system, w, x0, n);
  std::ostringstream csv;
  write_orbit_csv(csv, orbit);
  double sum = 0.0;
  for (double v : orbit.log_derivs) sum += v;
  Artifacts art;
  art.report = json{{"x0", x0},
                    {"n", n},
                    {"word", w.letters},
                    {"final_point", orbit.points.back()},
                    {"log_derivative_sum", sum},
                    {"mean_log_derivative", n ? sum / static_cast<double>(n) : 0.0}};
  art.csv = csv.str();
  return art;
}

Artifacts cmd_pliss(const RunConfig& cfg) {
  const json& p = cfg.params;
  LogPhiSequence seq;
  const double inflation = p["inflation"];
  if (!p["orbit"].get<std::string>().empty()) {
    std::ifstream in(p["orbit"].get<std::string>());
    if (!in) throw ParameterError("cannot open orbit file '" + p["orbit"].get<std::string>() + "'");
    seq = log_phi_from_orbit(read_orbit_csv(in), inflation);
  } else {
    const GeneratorSystem system = require_system(cfg);
    const double x0 = system.domain().canonical(p["x0"].get<double>());
    const std::size_t n = p["n"];
    seq = log_phi_from_orbit(compose_orbit(system, resolve_word(system, p["word"], x0, n), x0, n), inflation);
  }
  if (seq.size() == 0) throw LengthError("empty orbit");
  HyperbolicTimeReport rep;
  bool pass;
  if (!p["a"].is_null()) {
    rep = hyperbolic_times(seq, p["a"].get<double>());
    pass = !rep.advisory;
  } else if (!p["sigma"].is_null()) {
    rep = hyperbolic_times_bruteforce(seq, p["sigma"].get<double>());
    pass = !rep.times.empty();
  } else {
    throw ParameterError("pliss needs --a or --sigma");
  }
  Artifacts art;
  art.report = to_json(rep);
  art.report["expansion_exponent"] = expansion_exponent(seq);
  art.pass = pass;
  std::ostringstream csv;
  csv << "time\n";
  for (std::size_t t : rep.times) csv << t << '\n';
  art.csv = csv.str();
  return art;
}

// Smallest sigma for which n is a sigma-hyperbolic time: max over l of the backward averages.
double minimal_hyperbolic_rate(const LogPhiSequence& seq, std::size_t n) {
  double s = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 1; l <= n; ++l) {
    s += seq.values[n - l];
    worst = std::max(worst, s / static_cast<double>(l));
  }
  return std::exp(worst);
}

Artifacts cmd_preball(const RunConfig& cfg) {
  const GeneratorSystem system = require_system(cfg);
  const std::uint64_t seed = require_seed(cfg);
  const json& p = cfg.params;
  const double x = system.domain().canonical(p["x"].get<double>());
  const std::size_t n = p["n"];
  const Word w = resolve_word(system, p["word"], x, n);
  const double delta = p["delta"].is_null() ? uniform_preball_radius(system) : p["delta"].get<double>();

  PreballOptions opt;
  opt.strict = !p["advisory"].get<bool>();
  opt.inflation = p["inflation"];
  if (!p["sigma"].is_null()) {
    opt.sigma = p["sigma"];
  } else if (n == 0) {
    opt.sigma = 0.5;
  } else {
    opt.sigma = minimal_hyperbolic_rate(log_phi_from_orbit(compose_orbit(system, w, x, n), opt.inflation), n);
    if (!(opt.sigma < 1.0)) {
      if (opt.strict) throw PreconditionError("order " + std::to_string(n) + " is not a hyperbolic time for any sigma < 1");
      opt.sigma = 0.999;
    }
  }
  const Preball pb = build_preball(system, w, x, n, delta, opt);
  const ContractionReport contraction = verify_contraction(pb, p["samples"]);

  CounterRng rng(seed, 0);
  std::vector<std::pair<OffsetInterval, OffsetInterval>> pairs;
  const std::size_t npairs = p["pairs"];
  auto random_sub = [&] {
    double u = rng.uniform(-pb.left(), pb.right()), v = rng.uniform(-pb.left(), pb.right());
    if (u > v) std::swap(u, v);
    return OffsetInterval{u, v};
  };
  for (std::size_t i = 0; i < npairs; ++i) {
    OffsetInterval A = random_sub();
    OffsetInterval B = random_sub();
    pairs.emplace_back(A, B);
  }
  const DistortionReport distortion = check_bounded_distortion(pb, pairs);

  Artifacts art;
  art.report = json{{"preball", to_json(pb)}, {"contraction", to_json(contraction)}, {"distortion", to_json(distortion)}};
  art.pass = contraction.pass && distortion.pass && distortion.regularity.pass;
  std::ostringstream csv;
  csv.precision(17);
  csv << "step,max_ratio\n";
  for (std::size_t i = 0; i < contraction.max_ratio_by_step.size(); ++i)
    csv << i << ',' << contraction.max_ratio_by_step[i] << '\n';
  art.csv = csv.str();
  return art;
}

Artifacts cmd_classify(const RunConfig& cfg) {
  const GeneratorSystem system = require_system(cfg);
  const json& p = cfg.params;
  ClassifyOptions opt;
  opt.seed = require_seed(cfg);
  opt.samples = p["samples"];
  opt.horizon = p["horizon"];
  opt.strategy = SearchStrategy::parse(p["strategy"]);
  opt.a_threshold = p["a"];
  opt.tolerance = p["tolerance"];
  const ClassificationReport rep = classify_action(system, opt);
  Artifacts art;
  art.report = to_json(rep);
  art.pass = rep.expandable;
  std::ostringstream csv;
  csv.precision(17);
  csv << "index,x,exponent,hyperbolic_density\n";
  for (std::size_t i = 0; i < rep.samples.size(); ++i)
    csv << i << ',' << rep.samples[i].x << ',' << rep.samples[i].exponent << ',' << rep.samples[i].hyperbolic_density
        << '\n';
  art.csv = csv.str();
  return art;
}

WordSource word_source(const GeneratorSystem& system, const std::string& spec) {
  if (spec.empty()) return system.mode() == SystemMode::Sequence ? WordSource::fixed(sequence_word(0, system.size()))
                                                                 : WordSource::constant(0);
  if (spec.rfind("cyclic:", 0) == 0) return WordSource::cyclic(parse_indices(spec.substr(7)));
  if (spec == "sequence") return WordSource::fixed(sequence_word(0, system.size()));
  return WordSource::fixed(Word{parse_indices(spec), 0});
}

Artifacts cmd_ergodicity(const RunConfig& cfg) {
  const GeneratorSystem system = require_system(cfg);
  const json& p = cfg.params;
  const std::string mode = cfg.subcommand.substr(cfg.subcommand.find(' ') + 1);
  Artifacts art;
  if (mode == "cover") {
    const CoveringResult r = covering_time(system, word_source(system, p["word"]), p["center"], p["radius"],
                                           p["eps_grid"], p["budget"]);
    art.report = to_json(r);
    art.pass = r.n.has_value();
  } else if (mode == "exact") {
    const CoverState st = exactness_check(system, p["center"], p["radius"], p["budget"], p["eps_grid"]);
    art.report = to_json(st);
    art.pass = st.complete;
  } else if (mode == "minimal") {
    IntervalSet U;
    for (const auto& item : split(p["open"], ',')) {
      const auto ends = split(item, ':');
      if (ends.size() != 2) throw ParameterError("open set arcs are written lo:hi, got '" + item + "'");
      U.arcs.push_back({std::stod(ends[0]), std::stod(ends[1])});
    }
    const auto words = backward_minimality_check(system, U, p["budget"], p["eps_grid"]);
    json list = nullptr;
    if (words) {
      list = json::array();
      for (const auto& w : *words) list.push_back(w.letters);
    }
    art.report = json{{"cover_words", list}, {"found", words.has_value()}};
    art.pass = words.has_value();
  } else if (mode == "equi") {
    EquidistributionOptions opt;
    opt.seed = require_seed(cfg);
    opt.horizon = p["horizon"];
    opt.init_points = p["points"];
    opt.dither = p["dither"];
    if (!p["tolerance"].is_null()) opt.tolerance = p["tolerance"].get<double>();
    std::vector<TestFunction> fns;
    for (const auto& f : split(p["functions"], ',')) fns.push_back(TestFunction::parse(f));
    const std::string pol = p["policy"];
    BranchPolicy policy = pol == "greedy"   ? BranchPolicy::greedy()
                          : pol == "random" ? BranchPolicy::random()
                          : pol.rfind("fixed:", 0) == 0
                              ? BranchPolicy::fixed(word_source(system, pol.substr(6)))
                              : pol == "fixed" ? BranchPolicy::fixed(word_source(system, ""))
                                               : throw ParameterError("unknown policy '" + pol + "'");
    const ErgodicityReport rep = equidistribution_test(system, policy, fns, opt);
    art.report = to_json(rep);
    art.pass = rep.pass;
    std::ostringstream csv;
    csv.precision(17);
    csv << "step";
    for (const auto& f : fns) csv << ',' << f.name();
    csv << '\n';
    for (std::size_t i = 0; i < rep.series_steps.size(); ++i) {
      csv << rep.series_steps[i];
      for (double v : rep.series[i]) csv << ',' << v;
      csv << '\n';
    }
    art.csv = csv.str();
  } else if (mode == "invariant") {
    std::vector<std::size_t> seeds = parse_indices(p["cells"]);
    const ClosureResult r = invariant_set_closure(system, seeds, p["eps_grid"], p["max_iters"]);
    art.report = to_json(r);
    art.pass = r.converged;
  } else {
    throw ParameterError("unknown ergodicity mode '" + mode + "'");
  }
  return art;
}

Artifacts cmd_example(const RunConfig& cfg) {
  const json& p = cfg.params;
  json params = json::object();
  if (!p["params"].get<std::string>().empty()) {
    try {
      params = json::parse(p["params"].get<std::string>());
    } catch (const json::parse_error& e) {
      throw ParameterError(std::string("--params is not valid JSON: ") + e.what());
    }
  }
  const std::string name = p["name"];
  const GeneratorSystem system = catalog_system(name, params);
  Artifacts art;
  // The system fields sit at the document root so the output loads as a system file.
  art.top_level = system_to_json(system);
  art.report = json{{"name", name}};
  if (p["verify"].get<bool>()) {
    const auto prm = name == "paper-interval" ? IntervalExampleParams::from_json(params) : IntervalExampleParams::defaults();
    const ConditionReport rep = verify_example_conditions(system, prm);
    art.report["conditions"] = to_json(rep);
    art.pass = rep.all_pass;
  }
  if (system.size() == 2 && !system.domain().is_circle()) {
    std::ostringstream csv;
    write_example_figure_csv(csv, system);
    art.csv = csv.str();
  }
  return art;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.format == OutputFormat::Both && cfg.out_dir.empty())
      throw ParameterError("--format both needs --out");
    Artifacts art;
    const std::string top = cfg.subcommand.substr(0, cfg.subcommand.find(' '));
    if (top == "simulate") art = cmd_simulate(cfg);
    else if (top == "pliss") art = cmd_pliss(cfg);
    else if (top == "preball") art = cmd_preball(cfg);
    else if (top == "classify") art = cmd_classify(cfg);
    else if (top == "ergodicity") art = cmd_ergodicity(cfg);
    else if (top == "example") art = cmd_example(cfg);
    else throw ParameterError("unknown subcommand '" + cfg.subcommand + "'");
    emit(cfg, art, out);
    return art.pass ? kExitPass : kExitFail;
  } catch (const InvariantViolation& e) {
    err << "error: invariant violation (" << e.invariant() << "): " << e.what() << '\n';
  } catch (const SystemFileError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ReduceDeltaError& e) {
    err << "error: " << e.what() << " (largest feasible delta " << e.max_feasible_delta() << ")\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic times, preballs, expansion classes and ergodicity experiments for 1D systems", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  RunConfig cfg;
  std::string format = "json";
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub, bool needs_system) {
    auto* opt = sub->add_option("--system", cfg.system_path, "system definition file (JSON)");
    if (needs_system) opt->required();
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--out", cfg.out_dir, "write reports into this directory instead of stdout");
    sub->add_option("--format", format, "json | csv | both")->check(CLI::IsMember({"json", "csv", "both"}));
  };

  // simulate
  double sim_x0 = 0.1;
  std::size_t sim_n = 10;
  std::string sim_word;
  auto* simulate = app.add_subcommand("simulate", "compose an orbit and export it as CSV");
  common(simulate, true);
  simulate->add_option("--x0", sim_x0, "initial point");
  simulate->add_option("--n", sim_n, "number of steps");
  simulate->add_option("--word", sim_word, "0,1,1 | cyclic:0,1 | greedy | beam:k | exhaustive:d | sequence");

  // pliss
  double pl_x0 = 0.1, pl_inflation = 0.0;
  std::size_t pl_n = 1000;
  std::string pl_word, pl_orbit;
  std::optional<double> pl_a, pl_sigma;
  auto* pliss = app.add_subcommand("pliss", "hyperbolic times of an orbit");
  common(pliss, false);
  pliss->add_option("--orbit", pl_orbit, "orbit CSV (step,x,log_deriv)");
  pliss->add_option("--x0", pl_x0, "initial point when synthesizing the orbit");
  pliss->add_option("--n", pl_n, "orbit length when synthesizing");
  pliss->add_option("--word", pl_word, "word spec when synthesizing");
  pliss->add_option("--a", pl_a, "expansion margin a > 0 (Pliss extraction, sigma = exp(-a/2))");
  pliss->add_option("--sigma", pl_sigma, "sigma in (0,1) (direct scan)");
  pliss->add_option("--inflation", pl_inflation, "margin added to log theta");

  // preball
  double pb_x = 0.1, pb_inflation = 0.0;
  std::size_t pb_n = 5, pb_samples = 64, pb_pairs = 100;
  std::string pb_word;
  std::optional<double> pb_delta, pb_sigma;
  bool pb_advisory = false;
  auto* preball = app.add_subcommand("preball", "build and verify a hyperbolic preball");
  common(preball, true);
  preball->add_option("--x", pb_x, "base point");
  preball->add_option("--n", pb_n, "order");
  preball->add_option("--word", pb_word, "word spec");
  preball->add_option("--delta", pb_delta, "image radius (default: uniform radius of the system)");
  preball->add_option("--sigma", pb_sigma, "contraction rate (default: smallest rate making n hyperbolic)");
  preball->add_option("--inflation", pb_inflation, "margin added to log theta");
  preball->add_option("--samples", pb_samples, "equispaced samples for the contraction check");
  preball->add_option("--pairs", pb_pairs, "random subinterval pairs for the distortion check");
  preball->add_flag("--advisory", pb_advisory, "build even when n is not a hyperbolic time");

  // classify
  std::size_t cl_samples = 1000, cl_horizon = 1000;
  std::string cl_strategy = "greedy";
  double cl_a = -1e-6, cl_tol = 0.01;
  auto* classify = app.add_subcommand("classify", "classify the action by its expansion type");
  common(classify, true);
  classify->add_option("--samples", cl_samples, "Lebesgue sample size");
  classify->add_option("--horizon", cl_horizon, "branch length");
  classify->add_option("--strategy", cl_strategy, "greedy | beam:k | exhaustive:d");
  classify->add_option("--a", cl_a, "exponents below this count as negative");
  classify->add_option("--tolerance", cl_tol, "admissible exception fraction");

  // ergodicity
  auto* ergodicity = app.add_subcommand("ergodicity", "covering, exactness, minimality, equidistribution, invariant sets");
  ergodicity->require_subcommand(1);
  double er_center = 0.5, er_radius = 0.01, er_eps = std::ldexp(1.0, -10), er_dither = 1e-14;
  std::size_t er_budget = 10'000, er_horizon = 1'000'000, er_points = 10, er_iters = 100'000;
  std::string er_word, er_open = "0.45:0.55", er_policy = "fixed", er_functions = "cos:1,sin:1,cos:2", er_cells = "0";
  std::optional<double> er_tol;
  auto* e_cover = ergodicity->add_subcommand("cover", "covering time of a ball along a word");
  common(e_cover, true);
  e_cover->add_option("--center", er_center);
  e_cover->add_option("--radius", er_radius);
  e_cover->add_option("--eps-grid", er_eps);
  e_cover->add_option("--word", er_word, "0,1,1 | cyclic:0,1 | sequence");
  e_cover->add_option("--budget", er_budget);
  auto* e_exact = ergodicity->add_subcommand("exact", "breadth-first covering by images of a ball");
  common(e_exact, true);
  e_exact->add_option("--center", er_center);
  e_exact->add_option("--radius", er_radius);
  e_exact->add_option("--eps-grid", er_eps);
  e_exact->add_option("--budget", er_budget);
  auto* e_min = ergodicity->add_subcommand("minimal", "finite cover by images of an open set");
  common(e_min, true);
  e_min->add_option("--open", er_open, "arcs lo:hi separated by commas");
  e_min->add_option("--eps-grid", er_eps);
  e_min->add_option("--budget", er_budget);
  auto* e_equi = ergodicity->add_subcommand("equi", "Birkhoff averages against Lebesgue integrals");
  common(e_equi, true);
  e_equi->add_option("--policy", er_policy, "fixed[:word] | greedy | random");
  e_equi->add_option("--functions", er_functions, "cos:k, sin:k, const:c, trap:lo:hi:ramp");
  e_equi->add_option("--horizon", er_horizon);
  e_equi->add_option("--points", er_points);
  e_equi->add_option("--tolerance", er_tol);
  e_equi->add_option("--dither", er_dither);
  auto* e_inv = ergodicity->add_subcommand("invariant", "forward-invariant closure of grid cells");
  common(e_inv, true);
  e_inv->add_option("--cells", er_cells, "seed cell indices");
  e_inv->add_option("--eps-grid", er_eps);
  e_inv->add_option("--max-iters", er_iters);

  // example
  std::string ex_name, ex_params;
  bool ex_verify = false;
  auto* example = app.add_subcommand("example", "emit a catalog system, optionally with its condition report");
  common(example, false);
  example->add_option("--name", ex_name, "doubling | perturbed | rotation | identity | mobius-pair | paper-interval")
      ->required();
  example->add_option("--params", ex_params, "family parameters as a JSON object");
  example->add_flag("--verify", ex_verify, "check the interval-example conditions");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  CLI::App* leaf = sub;
  if (sub == ergodicity) {
    leaf = ergodicity->get_subcommands().front();
    cfg.subcommand += " " + leaf->get_name();
  }
  if (leaf->count("--seed")) cfg.seed = seed;
  cfg.format = format == "csv" ? OutputFormat::Csv : format == "both" ? OutputFormat::Both : OutputFormat::Json;
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

  json& p = cfg.params;
  if (sub == simulate) {
    p = {{"x0", sim_x0}, {"n", sim_n}, {"word", sim_word}};
  } else if (sub == pliss) {
    p = {{"orbit", pl_orbit}, {"x0", pl_x0},         {"n", pl_n},
         {"word", pl_word},   {"a", opt_json(pl_a)}, {"sigma", opt_json(pl_sigma)},
         {"inflation", pl_inflation}};
  } else if (sub == preball) {
    p = {{"x", pb_x},
         {"n", pb_n},
         {"word", pb_word},
         {"delta", opt_json(pb_delta)},
         {"sigma", opt_json(pb_sigma)},
         {"inflation", pb_inflation},
         {"samples", pb_samples},
         {"pairs", pb_pairs},
         {"advisory", pb_advisory}};
  } else if (sub == classify) {
    p = {{"samples", cl_samples}, {"horizon", cl_horizon}, {"strategy", cl_strategy}, {"a", cl_a}, {"tolerance", cl_tol}};
  } else if (sub == ergodicity) {
    if (leaf == e_cover)
      p = {{"center", er_center}, {"radius", er_radius}, {"eps_grid", er_eps}, {"word", er_word}, {"budget", er_budget}};
    else if (leaf == e_exact)
      p = {{"center", er_center}, {"radius", er_radius}, {"eps_grid", er_eps}, {"budget", er_budget}};
    else if (leaf == e_min)
      p = {{"open", er_open}, {"eps_grid", er_eps}, {"budget", er_budget}};
    else if (leaf == e_equi)
      p = {{"policy", er_policy}, {"functions", er_functions}, {"horizon", er_horizon},
           {"points", er_points}, {"tolerance", opt_json(er_tol)}, {"dither", er_dither}};
    else
      p = {{"cells", er_cells}, {"eps_grid", er_eps}, {"max_iters", er_iters}};
  } else {
    p = {{"name", ex_name}, {"params", ex_params}, {"verify", ex_verify}};
  }
  p["format"] = format_name(cfg.format);
  return run(cfg, out, err);
}

}  // namespace xlab
