#include "janglab/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace janglab {

namespace {

using nlohmann::json;

void collect(std::vector<std::string>& errors, bool ok, const std::string& msg) {
  if (!ok) errors.push_back(msg);
}

DataFamily parse_family(const json& doc, std::vector<std::string>& errors) {
  DataFamily family;
  if (!doc.contains("family")) return family;  // defaults to pure_ads
  const json& f = doc.at("family");
  const std::string kind = f.value("kind", "pure_ads");
  if (kind == "pure_ads") {
    family = DataFamily::pure_ads();
  } else if (kind == "conformal_perturbation") {
    collect(errors, f.contains("c") && f.contains("p"),
            "family.conformal_perturbation requires fields c and p");
    family = DataFamily::conformal(f.value("c", 0.0), f.value("p", 1.0));
  } else if (kind == "tensor_perturbation") {
    collect(errors, f.contains("amplitude") && f.contains("p"),
            "family.tensor_perturbation requires fields amplitude and p");
    family = DataFamily::tensor(f.value("amplitude", 0.0), f.value("mode", 0),
                                f.value("p", 1.0));
    collect(errors, family.mode >= 0 && family.mode <= 2,
            "family.mode must be 0, 1 or 2");
  } else if (kind == "radial_table") {
    const std::string g_rr = f.value("g_rr", "");
    const std::string g_ss = f.value("g_ss", "");
    collect(errors, !g_rr.empty() && !g_ss.empty(),
            "family.radial_table requires CSV paths g_rr and g_ss");
    if (!g_rr.empty() && !g_ss.empty()) {
      RadialData table;
      table.g_rr = profile_from_csv(g_rr);
      table.g_ss = profile_from_csv(g_ss);
      table.k_rr = f.contains("k_rr") ?
          profile_from_csv(f.at("k_rr").get<std::string>()) : constant_profile(0);
      table.k_ss = f.contains("k_ss") ?
          profile_from_csv(f.at("k_ss").get<std::string>()) : constant_profile(0);
      family = DataFamily::from_profiles(std::move(table));
    }
  } else {
    errors.push_back("family.kind must be one of pure_ads, "
                     "conformal_perturbation, tensor_perturbation, radial_table");
  }
  return family;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc, const std::string& subcommand) {
  std::vector<std::string> errors;
  RunConfig config;

  config.dimension = doc.value("dimension", 3);
  collect(errors, config.dimension >= 3 && config.dimension <= 7,
          "dimension must lie in {3..7}");
  config.tau = doc.value("tau", 0.75 * config.dimension);
  collect(errors, config.tau > 0.0, "tau must be positive");
  config.alpha = doc.value("alpha", 0.0);
  collect(errors, config.alpha >= 0.0 && config.alpha < 1.0,
          "alpha must lie in [0, 1)");

  config.family = parse_family(doc, errors);

  if (doc.contains("warp")) {
    const json& w = doc.at("warp");
    const std::string kind = w.value("kind", "v0");
    if (kind == "v0") {
      config.warp.kind = WarpSpec::Kind::v0;
    } else if (kind == "rho_inverse") {
      config.warp.kind = WarpSpec::Kind::rho_inverse;
    } else if (kind == "table") {
      config.warp.kind = WarpSpec::Kind::table;
      config.warp.table_path = w.value("path", "");
      collect(errors, !config.warp.table_path.empty(),
              "warp.table requires a path");
    } else {
      errors.push_back("warp.kind must be v0, rho_inverse or table");
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    config.solver.rho_min = s.value("rho_min", config.solver.rho_min);
    config.solver.rho_max = s.value("rho_max", config.solver.rho_max);
    config.solver.grid_n = s.value("grid_n", config.solver.grid_n);
    const std::string spacing = s.value("grid_type", "log");
    if (spacing == "log")
      config.solver.grid_type = RadialGrid::Spacing::log_spacing;
    else if (spacing == "uniform")
      config.solver.grid_type = RadialGrid::Spacing::uniform;
    else
      errors.push_back("solver.grid_type must be log or uniform");
    config.solver.epsilon_start =
        s.value("epsilon_start", config.solver.epsilon_start);
    config.solver.epsilon_min = s.value("epsilon_min", config.solver.epsilon_min);
    config.solver.newton_tol = s.value("newton_tol", config.solver.newton_tol);
    config.solver.limit_tol = s.value("limit_tol", config.solver.limit_tol);
    config.solver.max_outer = s.value("max_outer", config.solver.max_outer);
    config.solver.phi_inner = s.value("phi_inner", config.solver.phi_inner);
    config.solver.phi_outer = s.value("phi_outer", config.solver.phi_outer);
  }
  collect(errors,
          config.solver.rho_min > 0.0 &&
              config.solver.rho_min < config.solver.rho_max &&
              config.solver.rho_max <= 0.5,
          "solver annulus requires 0 < rho_min < rho_max <= 1/2");
  collect(errors, config.solver.grid_n >= 16, "solver.grid_n must be >= 16");
  collect(errors,
          config.solver.epsilon_min > 0.0 &&
              config.solver.epsilon_min <= config.solver.epsilon_start,
          "solver epsilon schedule requires 0 < epsilon_min <= epsilon_start");
  collect(errors, config.solver.newton_tol > 0.0, "newton_tol must be positive");

  if (doc.contains("mass")) {
    const json& m = doc.at("mass");
    if (m.contains("radii"))
      config.mass.radii = m.at("radii").get<std::vector<double>>();
    config.mass.rho_base = m.value("rho_base", config.mass.rho_base);
    config.mass.levels = m.value("levels", config.mass.levels);
    collect(errors, config.mass.levels >= 4,
            "mass.levels must be >= 4 for extrapolation");
  }
  if (subcommand == "mass" || subcommand == "report")
    collect(errors, 2.0 * config.tau > config.dimension,
            "mass extrapolation requires 2*tau > n (declared decay too weak)");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    config.output.path = o.value("path", config.output.path);
    const std::string fmt = o.value("format", "csv");
    if (fmt == "csv")
      config.output.format = OutputBlock::Format::csv;
    else if (fmt == "json")
      config.output.format = OutputBlock::Format::json;
    else
      errors.push_back("output.format must be csv or json");
  }
  config.seed = doc.value("seed", std::uint64_t{0});

  if (!errors.empty()) {
    std::string joined = "invalid configuration:";
    for (const auto& e : errors) joined += "\n  - " + e;
    throw std::invalid_argument(joined);
  }
  return config;
}

RunConfig load_config(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  return parse_config(doc, subcommand);
}

InitialData RunConfig::make_data() const {
  return make_initial_data(family, dimension, tau, alpha);
}

RadialProfile RunConfig::make_warp_profile() const {
  switch (warp.kind) {
    case WarpSpec::Kind::v0:
      return v0_profile();
    case WarpSpec::Kind::rho_inverse:
      return inverse_rho_profile();
    case WarpSpec::Kind::table:
      return profile_from_csv(warp.table_path);
  }
  throw std::logic_error("unreachable");
}

Vec RunConfig::mass_schedule() const {
  if (!mass.radii.empty()) {
    Vec s(mass.radii.size());
    for (size_t i = 0; i < mass.radii.size(); ++i) s[i] = mass.radii[i];
    return s;
  }
  Vec s(mass.levels);
  for (int k = 0; k < mass.levels; ++k)
    s[k] = mass.rho_base * std::pow(2.0, -k);
  return s;
}

Vec RunConfig::epsilon_schedule() const {
  std::vector<double> eps;
  for (double e = solver.epsilon_start; e >= solver.epsilon_min * (1.0 - 1e-12);
       e *= 0.5)
    eps.push_back(e);
  if (eps.empty()) eps.push_back(solver.epsilon_start);
  return Eigen::Map<Vec>(eps.data(), eps.size());
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json j;
  j["dimension"] = config.dimension;
  j["tau"] = config.tau;
  j["alpha"] = config.alpha;
  switch (config.family.kind) {
    case DataFamily::Kind::pure_ads:
      j["family"] = {{"kind", "pure_ads"}};
      break;
    case DataFamily::Kind::conformal_perturbation:
      j["family"] = {{"kind", "conformal_perturbation"},
                     {"c", config.family.c},
                     {"p", config.family.p}};
      break;
    case DataFamily::Kind::tensor_perturbation:
      j["family"] = {{"kind", "tensor_perturbation"},
                     {"amplitude", config.family.amplitude},
                     {"mode", config.family.mode},
                     {"p", config.family.p}};
      break;
    case DataFamily::Kind::radial_table:
      j["family"] = {{"kind", "radial_table"}};
      break;
  }
  j["warp"] = {{"kind", config.warp.kind == WarpSpec::Kind::v0
                            ? "v0"
                            : (config.warp.kind == WarpSpec::Kind::rho_inverse
                                   ? "rho_inverse"
                                   : "table")}};
  j["solver"] = {{"rho_min", config.solver.rho_min},
                 {"rho_max", config.solver.rho_max},
                 {"grid_n", config.solver.grid_n},
                 {"grid_type", config.solver.grid_type ==
                                       RadialGrid::Spacing::log_spacing
                                   ? "log"
                                   : "uniform"},
                 {"epsilon_start", config.solver.epsilon_start},
                 {"epsilon_min", config.solver.epsilon_min},
                 {"newton_tol", config.solver.newton_tol},
                 {"limit_tol", config.solver.limit_tol},
                 {"max_outer", config.solver.max_outer},
                 {"phi_inner", config.solver.phi_inner},
                 {"phi_outer", config.solver.phi_outer}};
  nlohmann::json mass_j;
  if (!config.mass.radii.empty()) mass_j["radii"] = config.mass.radii;
  mass_j["rho_base"] = config.mass.rho_base;
  mass_j["levels"] = config.mass.levels;
  j["mass"] = mass_j;
  j["output"] = {{"path", config.output.path},
                 {"format", config.output.format == OutputBlock::Format::csv
                                ? "csv"
                                : "json"}};
  j["seed"] = config.seed;
  return j;
}

}  // namespace janglab
