#pragma once

#include <cmath>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "janglab/radial_solver.hpp"

// Run configuration: a single JSON document validated up front (every
// violation reported at once), with all physical defaults materialized so
// emitted reports are self-describing.

namespace janglab {

struct WarpSpec {
  enum class Kind { v0, rho_inverse, table };
  Kind kind = Kind::v0;
  std::string table_path;
};

struct SolverBlock {
  double rho_min = 0.05;
  double rho_max = 0.45;
  int grid_n = 256;
  RadialGrid::Spacing grid_type = RadialGrid::Spacing::log_spacing;
  double epsilon_start = 1e-2;
  double epsilon_min = 1e-2 * std::pow(2.0, -16);
  double newton_tol = 1e-10;
  double limit_tol = 1e-7;
  int max_outer = 30;
  double phi_inner = 0.0;
  double phi_outer = 0.0;
};

struct MassBlock {
  std::vector<double> radii;  // explicit levels; empty -> auto schedule
  double rho_base = 1e-3;
  int levels = 6;
};

struct OutputBlock {
  std::string path = "out";
  enum class Format { csv, json };
  Format format = Format::csv;
};

struct RunConfig {
  int dimension = 3;
  double tau = 2.25;
  double alpha = 0.0;  // Hoelder regularity metadata, recorded only
  DataFamily family;
  WarpSpec warp;
  SolverBlock solver;
  MassBlock mass;
  OutputBlock output;
  std::uint64_t seed = 0;

  InitialData make_data() const;
  RadialProfile make_warp_profile() const;
  Vec mass_schedule() const;
  Vec epsilon_schedule() const;
};

/// Parses and validates; collects every violation and throws a single
/// std::invalid_argument listing all of them. `subcommand` scopes the
/// validation (e.g. the mass stage requires 2 tau > n).
RunConfig parse_config(const nlohmann::json& doc, const std::string& subcommand);
RunConfig load_config(const std::string& path, const std::string& subcommand);

/// Config echo with every default materialized.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace janglab
