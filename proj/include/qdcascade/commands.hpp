#pragma once
// CLI command implementations.  Each command writes its outputs plus a
// run_metadata.json (config hash, tool version, seed) into cfg.output.dir and
// returns the paths it wrote.  Errors surface as exceptions; the CLI frontend
// turns them into machine-readable JSON on stderr.

#include <string>
#include <vector>

#include "qdcascade/config.hpp"

namespace qdc {

std::vector<std::string> cmd_populations(const RunConfig& cfg);
std::vector<std::string> cmd_sweep(const RunConfig& cfg);
std::vector<std::string> cmd_optimize(const RunConfig& cfg);
std::vector<std::string> cmd_montecarlo(const RunConfig& cfg);
std::vector<std::string> cmd_analyze(const RunConfig& cfg);
std::vector<std::string> cmd_compare(const RunConfig& cfg);

}  // namespace qdc
