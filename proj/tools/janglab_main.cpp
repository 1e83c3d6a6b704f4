#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "janglab/pipeline.hpp"

// Subcommands: verify | barriers | solve-radial | solve-coupled | mass |
// report. A single JSON config drives every stage; --out, --format and
// --seed override the corresponding config fields.

int main(int argc, char** argv) {
  CLI::App app{"generalized Jang equation laboratory for asymptotically "
               "anti-de Sitter initial data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;

  const std::vector<std::string> names = {"verify",       "barriers",
                                          "solve-radial", "solve-coupled",
                                          "mass",         "report"};
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "path to the JSON run config")
        ->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--format", format, "csv|json (overrides config)");
    sub->add_option("--seed", seed, "RNG seed for sampling operations")
        ->each([&](const std::string&) { seed_set = true; });
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    janglab::RunConfig config = janglab::load_config(config_path, subcommand);
    if (!out_dir.empty()) config.output.path = out_dir;
    if (!format.empty()) {
      if (format == "csv")
        config.output.format = janglab::OutputBlock::Format::csv;
      else if (format == "json")
        config.output.format = janglab::OutputBlock::Format::json;
      else
        throw std::invalid_argument("--format must be csv or json");
    }
    if (seed_set) config.seed = seed;
    return janglab::run_stage(config, subcommand);
  } catch (const std::exception& err) {
    nlohmann::json block;
    block["error"] = err.what();
    block["subcommand"] = subcommand;
    std::cerr << block.dump(2) << "\n";
    return 2;
  }
}
