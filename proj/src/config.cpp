#include "qdcascade/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

using nlohmann::json;

namespace qdc {

namespace {

void _reject_unknown(const json& j, const std::vector<std::string>& known,
                     const std::string& section) {
  if (!j.is_object())
    throw std::invalid_argument("config: '" + section +
                                "' must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const std::string& k : known)
      if (k == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("config: unknown key '" +
                                  (section.empty() ? key : section + "." + key) +
                                  "'");
  }
}

template <typename T>
void _get(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config: key '" + section + "." + key +
                                "' has the wrong type");
  }
}

FrameMode _frame_from_string(const std::string& s) {
  if (s == "rotating") return FrameMode::RotatingBasis;
  if (s == "static") return FrameMode::StaticBasis;
  throw std::invalid_argument(
      "config: simulation.frame must be \"rotating\" or \"static\"");
}

std::string _frame_to_string(FrameMode m) {
  return m == FrameMode::RotatingBasis ? "rotating" : "static";
}

Level _level_from_string(const std::string& s) {
  if (s == "ground") return Level::Ground;
  if (s == "exciton") return Level::Exciton;
  if (s == "biexciton") return Level::Biexciton;
  throw std::invalid_argument(
      "config: simulation.initial must be \"ground\", \"exciton\" or "
      "\"biexciton\"");
}

std::string _level_to_string(Level l) {
  switch (l) {
    case Level::Ground: return "ground";
    case Level::Exciton: return "exciton";
    default: return "biexciton";
  }
}

OutputFormat _format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw std::invalid_argument("config: output.format must be \"csv\" or \"json\"");
}

}  // namespace

void RunConfig::validate() const {
  device.validate();
  waveform.validate();
  detector.validate();
  if (simulation.duration < 0)
    throw std::invalid_argument("config: simulation.duration must be >= 0");
  if (simulation.samples_per_cycle < 2)
    throw std::invalid_argument("config: simulation.samples_per_cycle must be >= 2");
  if (simulation.n_cycles < 1)
    throw std::invalid_argument("config: simulation.n_cycles must be >= 1");
  if (analysis.bin_width <= 0)
    throw std::invalid_argument("config: analysis.bin_width must be > 0");
  if (analysis.span < 0)
    throw std::invalid_argument("config: analysis.span must be >= 0");
  if (analysis.norm_lo < 1 || analysis.norm_hi < analysis.norm_lo)
    throw std::invalid_argument(
        "config: need 1 <= analysis.norm_lo <= analysis.norm_hi");
  if (analysis.horizon_periods <= 0)
    throw std::invalid_argument("config: analysis.horizon_periods must be > 0");
  // A single-point sweep evaluates f_min_ghz only, so f_max_ghz may equal it.
  if (sweep.f_min_ghz <= 0 ||
      (sweep.n_points > 1 ? sweep.f_max_ghz <= sweep.f_min_ghz
                          : sweep.f_max_ghz < sweep.f_min_ghz))
    throw std::invalid_argument(
        "config: need 0 < sweep.f_min_ghz <= sweep.f_max_ghz");
  if (sweep.n_points < 1)
    throw std::invalid_argument("config: sweep.n_points must be >= 1");
  if (output.dir.empty())
    throw std::invalid_argument("config: output.dir must not be empty");
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  _reject_unknown(j, {"device", "waveform", "detector", "simulation",
                      "analysis", "sweep", "output"},
                  "");

  if (j.contains("device")) {
    const json& d = j.at("device");
    _reject_unknown(d, {"tau_xx", "tau_x", "tunnel_rate", "f0", "t_coh",
                        "fss_omega"},
                    "device");
    _get(d, "tau_xx", cfg.device.tau_xx, "device");
    _get(d, "tau_x", cfg.device.tau_x, "device");
    _get(d, "tunnel_rate", cfg.device.tunnel_rate, "device");
    _get(d, "f0", cfg.device.f0, "device");
    _get(d, "t_coh", cfg.device.t_coh, "device");
    _get(d, "fss_omega", cfg.device.fss_omega, "device");
  }

  if (j.contains("waveform")) {
    const json& w = j.at("waveform");
    _reject_unknown(w, {"dc_rate", "pulse_rate", "pulse_width", "period",
                        "phase"},
                    "waveform");
    _get(w, "dc_rate", cfg.waveform.dc_rate, "waveform");
    _get(w, "pulse_rate", cfg.waveform.pulse_rate, "waveform");
    _get(w, "pulse_width", cfg.waveform.pulse_width, "waveform");
    _get(w, "period", cfg.waveform.period, "waveform");
    _get(w, "phase", cfg.waveform.phase, "waveform");
  }

  if (j.contains("detector")) {
    const json& d = j.at("detector");
    _reject_unknown(d, {"efficiency", "jitter_sigma", "dark_rate"}, "detector");
    if (d.contains("efficiency")) {
      std::vector<double> eff;
      _get(d, "efficiency", eff, "detector");
      if (eff.size() != kChannels)
        throw std::invalid_argument(
            "config: detector.efficiency must list 4 channels");
      for (size_t i = 0; i < kChannels; ++i) cfg.detector.efficiency[i] = eff[i];
    }
    _get(d, "jitter_sigma", cfg.detector.jitter_sigma, "detector");
    if (d.contains("dark_rate")) {
      std::vector<double> dark;
      _get(d, "dark_rate", dark, "detector");
      if (dark.size() != kChannels)
        throw std::invalid_argument(
            "config: detector.dark_rate must list 4 channels");
      for (size_t i = 0; i < kChannels; ++i) cfg.detector.dark_rate[i] = dark[i];
    }
  }

  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    _reject_unknown(s, {"duration", "seed", "samples_per_cycle", "n_cycles",
                        "frame", "initial"},
                    "simulation");
    _get(s, "duration", cfg.simulation.duration, "simulation");
    _get(s, "seed", cfg.simulation.seed, "simulation");
    _get(s, "samples_per_cycle", cfg.simulation.samples_per_cycle, "simulation");
    _get(s, "n_cycles", cfg.simulation.n_cycles, "simulation");
    if (s.contains("frame")) {
      std::string frame;
      _get(s, "frame", frame, "simulation");
      cfg.simulation.frame = _frame_from_string(frame);
    }
    if (s.contains("initial")) {
      std::string initial;
      _get(s, "initial", initial, "simulation");
      cfg.simulation.initial = _level_from_string(initial);
    }
  }

  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    _reject_unknown(a, {"bin_width", "span", "norm_lo", "norm_hi",
                        "min_counts", "horizon_periods", "inputs"},
                    "analysis");
    _get(a, "bin_width", cfg.analysis.bin_width, "analysis");
    _get(a, "span", cfg.analysis.span, "analysis");
    _get(a, "norm_lo", cfg.analysis.norm_lo, "analysis");
    _get(a, "norm_hi", cfg.analysis.norm_hi, "analysis");
    _get(a, "min_counts", cfg.analysis.min_counts, "analysis");
    _get(a, "horizon_periods", cfg.analysis.horizon_periods, "analysis");
    _get(a, "inputs", cfg.analysis.inputs, "analysis");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    _reject_unknown(s, {"f_min_ghz", "f_max_ghz", "n_points"}, "sweep");
    _get(s, "f_min_ghz", cfg.sweep.f_min_ghz, "sweep");
    _get(s, "f_max_ghz", cfg.sweep.f_max_ghz, "sweep");
    _get(s, "n_points", cfg.sweep.n_points, "sweep");
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    _reject_unknown(o, {"dir", "format"}, "output");
    _get(o, "dir", cfg.output.dir, "output");
    if (o.contains("format")) {
      std::string fmt;
      _get(o, "format", fmt, "output");
      cfg.output.format = _format_from_string(fmt);
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: '" + path + "' is not valid JSON: " +
                                e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["device"] = {{"tau_xx", cfg.device.tau_xx},
                 {"tau_x", cfg.device.tau_x},
                 {"tunnel_rate", cfg.device.tunnel_rate},
                 {"f0", cfg.device.f0},
                 {"t_coh", cfg.device.t_coh},
                 {"fss_omega", cfg.device.fss_omega}};
  j["waveform"] = {{"dc_rate", cfg.waveform.dc_rate},
                   {"pulse_rate", cfg.waveform.pulse_rate},
                   {"pulse_width", cfg.waveform.pulse_width},
                   {"period", cfg.waveform.period},
                   {"phase", cfg.waveform.phase}};
  j["detector"] = {
      {"efficiency", std::vector<double>(cfg.detector.efficiency.begin(),
                                         cfg.detector.efficiency.end())},
      {"jitter_sigma", cfg.detector.jitter_sigma},
      {"dark_rate", std::vector<double>(cfg.detector.dark_rate.begin(),
                                        cfg.detector.dark_rate.end())}};
  j["simulation"] = {{"duration", cfg.simulation.duration},
                     {"seed", cfg.simulation.seed},
                     {"samples_per_cycle", cfg.simulation.samples_per_cycle},
                     {"n_cycles", cfg.simulation.n_cycles},
                     {"frame", _frame_to_string(cfg.simulation.frame)},
                     {"initial", _level_to_string(cfg.simulation.initial)}};
  j["analysis"] = {{"bin_width", cfg.analysis.bin_width},
                   {"span", cfg.analysis.span},
                   {"norm_lo", cfg.analysis.norm_lo},
                   {"norm_hi", cfg.analysis.norm_hi},
                   {"min_counts", cfg.analysis.min_counts},
                   {"horizon_periods", cfg.analysis.horizon_periods},
                   {"inputs", cfg.analysis.inputs}};
  j["sweep"] = {{"f_min_ghz", cfg.sweep.f_min_ghz},
                {"f_max_ghz", cfg.sweep.f_max_ghz},
                {"n_points", cfg.sweep.n_points}};
  j["output"] = {{"dir", cfg.output.dir},
                 {"format",
                  cfg.output.format == OutputFormat::Csv ? "csv" : "json"}};
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  // nlohmann::json objects iterate in sorted key order, so dump() is canonical.
  const std::string dump = config_to_json(cfg).dump();
  uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace qdc
