// qdcascade command-line tool: simulation, optimization and time-tag analysis
// for an electrically reset three-level photon-pair emitter.
//
// Exit codes: 0 success, 2 configuration/usage error, 1 runtime error.
// Errors are emitted as one JSON object on stderr.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdcascade/commands.hpp"
#include "qdcascade/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int _fail(const std::string& kind, const std::string& message) {
  nlohmann::json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << std::endl;
  return kind == "config" ? kExitConfig : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator and correlation-analysis toolkit for an actively reset "
      "biexciton-exciton photon-pair source"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> inputs;

  app.add_option("--config", config_path, "Run configuration (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Random seed (overrides config)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--format", format, "Table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* c_pop = app.add_subcommand(
      "populations", "Periodic-steady-state level populations vs time");
  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "Pair rate vs drive clock frequency");
  CLI::App* c_opt = app.add_subcommand(
      "optimize", "Optimal clock rate and superequilibrium band");
  CLI::App* c_mc = app.add_subcommand(
      "montecarlo", "Stochastic photon streams, one tag file per basis");
  CLI::App* c_an = app.add_subcommand(
      "analyze", "Correlation and fidelity analysis of tag files");
  CLI::App* c_cmp = app.add_subcommand(
      "compare", "Entangled-pair yield of a driven vs a reference run");
  for (CLI::App* c : {c_pop, c_sweep, c_opt, c_mc, c_an, c_cmp})
    c->fallthrough();  // global flags may follow the subcommand
  for (CLI::App* c : {c_an, c_cmp})
    c->add_option("inputs", inputs, "Time-tag files (override config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::ostringstream silent;
    app.exit(e, silent, silent);
    return _fail("config", e.what());
  }

  try {
    qdc::RunConfig cfg;
    try {
      if (!config_path.empty()) cfg = qdc::load_config(config_path);
      if (!out_dir.empty()) cfg.output.dir = out_dir;
      if (seed_set) cfg.simulation.seed = seed;
      if (format == "csv") cfg.output.format = qdc::OutputFormat::Csv;
      if (format == "json") cfg.output.format = qdc::OutputFormat::Json;
      if (!inputs.empty()) cfg.analysis.inputs = inputs;
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      return _fail("config", e.what());
    }

    std::vector<std::string> paths;
    try {
      if (c_pop->parsed()) paths = qdc::cmd_populations(cfg);
      else if (c_sweep->parsed()) paths = qdc::cmd_sweep(cfg);
      else if (c_opt->parsed()) paths = qdc::cmd_optimize(cfg);
      else if (c_mc->parsed()) paths = qdc::cmd_montecarlo(cfg);
      else if (c_an->parsed()) paths = qdc::cmd_analyze(cfg);
      else if (c_cmp->parsed()) paths = qdc::cmd_compare(cfg);
    } catch (const std::invalid_argument& e) {
      return _fail("config", e.what());
    }

    for (const std::string& p : paths) std::cout << p << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return _fail("runtime", e.what());
  }
}
