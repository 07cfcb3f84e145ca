#pragma once
// Run configuration: one JSON file with nested sections (device, waveform,
// detector, simulation, analysis, sweep, output).  Unknown keys are rejected
// with their location; values are validated with the offending key named.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdcascade/model.hpp"
#include "qdcascade/montecarlo.hpp"

namespace qdc {

struct SimulationConfig {
  double duration = 1e7;        // [ps]
  uint64_t seed = 1;
  int samples_per_cycle = 200;  // populations output
  int n_cycles = 4;             // populations output
  FrameMode frame = FrameMode::RotatingBasis;
  Level initial = Level::Ground;
};

struct AnalysisConfig {
  double bin_width = 16;     // [ps]
  int span = 20;             // cycle offsets kept in coincidence maps
  int norm_lo = 5, norm_hi = 20;
  uint64_t min_counts = 25;
  double horizon_periods = 2.0;  // model fidelity map t2 horizon
  std::vector<std::string> inputs;  // tag files for `analyze`
};

struct SweepConfig {
  double f_min_ghz = 0.1;
  double f_max_ghz = 10.0;
  int n_points = 120;
};

enum class OutputFormat : uint8_t { Csv = 0, Json = 1 };

struct OutputConfig {
  std::string dir = "out";
  OutputFormat format = OutputFormat::Csv;
};

struct RunConfig {
  DeviceParams device;
  DriveWaveform waveform = DriveWaveform::pulsed(787.0, 0.2, 50.0);
  DetectorModel detector;
  SimulationConfig simulation;
  AnalysisConfig analysis;
  SweepConfig sweep;
  OutputConfig output;

  void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

// FNV-1a hash of the canonical (sorted-key) serialization; stable across runs.
std::string config_hash(const RunConfig& cfg);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace qdc
