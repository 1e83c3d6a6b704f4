#pragma once

#include <nlohmann/json.hpp>

#include "janglab/config.hpp"
#include "janglab/mass.hpp"

// Stage orchestration behind the CLI: verify -> barriers -> solve -> mass,
// each stage emitting plot-ready CSV plus a JSON report. Emitted files are
// byte-deterministic for a fixed (config, seed); timings go to the stderr
// log only.

namespace janglab {

struct StageResult {
  std::string name;
  bool pass = false;
  nlohmann::json details;
  std::vector<std::string> artifacts;
};

StageResult run_verify(const RunConfig& config);
StageResult run_barriers(const RunConfig& config);
StageResult run_solve_radial(const RunConfig& config);
StageResult run_solve_coupled(const RunConfig& config);
StageResult run_mass(const RunConfig& config);
/// Aggregates the per-stage JSON reports found in the output directory.
StageResult run_report(const RunConfig& config);

/// Dispatch by subcommand name; writes the stage JSON next to its CSV and
/// returns the process exit code (0 iff the stage passed).
int run_stage(const RunConfig& config, const std::string& subcommand);

/// Full-precision decimal formatting used by every CSV writer.
std::string format_number(double v);

}  // namespace janglab
