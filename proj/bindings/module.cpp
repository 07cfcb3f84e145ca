// Python bindings for the qdcascade toolkit.  The module mirrors the C++
// public API: model/dynamics (populations, steady states), analytic pair
// metrics, optimizers, the stochastic photon-stream generator, tag-file IO,
// and the correlation/fidelity analyzers, plus the CLI command entry points.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qdcascade/analyzer.hpp"
#include "qdcascade/commands.hpp"
#include "qdcascade/config.hpp"
#include "qdcascade/dynamics.hpp"
#include "qdcascade/metrics.hpp"
#include "qdcascade/model.hpp"
#include "qdcascade/montecarlo.hpp"
#include "qdcascade/optimize.hpp"
#include "qdcascade/timetags.hpp"

namespace py = pybind11;
using namespace qdc;

PYBIND11_MODULE(qdcascade, m) {
  m.doc() =
      "Simulator and correlation analysis for an actively reset "
      "biexciton-exciton photon-pair source (times ps, pair rates pairs/ns)";
  m.attr("__version__") = kToolVersion;
  m.attr("QBER_SECURE_THRESHOLD") = kQberSecureThreshold;

  // ---- model ----
  py::enum_<Level>(m, "Level")
      .value("GROUND", Level::Ground)
      .value("EXCITON", Level::Exciton)
      .value("BIEXCITON", Level::Biexciton);

  py::class_<Populations>(m, "Populations")
      .def(py::init<>())
      .def(py::init([](double g, double x, double xx) {
             return Populations{g, x, xx};
           }),
           py::arg("g"), py::arg("x"), py::arg("xx"))
      .def_readwrite("g", &Populations::g)
      .def_readwrite("x", &Populations::x)
      .def_readwrite("xx", &Populations::xx)
      .def("sum", &Populations::sum)
      .def("validate", &Populations::validate, py::arg("tol") = 1e-9)
      .def("__repr__", [](const Populations& p) {
        std::ostringstream s;
        s << "Populations(g=" << p.g << ", x=" << p.x << ", xx=" << p.xx << ")";
        return s.str();
      });

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("tau_xx", &DeviceParams::tau_xx)
      .def_readwrite("tau_x", &DeviceParams::tau_x)
      .def_readwrite("tunnel_rate", &DeviceParams::tunnel_rate)
      .def_readwrite("f0", &DeviceParams::f0)
      .def_readwrite("t_coh", &DeviceParams::t_coh)
      .def_readwrite("fss_omega", &DeviceParams::fss_omega)
      .def("a", &DeviceParams::a)
      .def("b", &DeviceParams::b)
      .def("validate", &DeviceParams::validate);

  py::class_<DriveWaveform>(m, "DriveWaveform")
      .def(py::init<>())
      .def_readwrite("dc_rate", &DriveWaveform::dc_rate)
      .def_readwrite("pulse_rate", &DriveWaveform::pulse_rate)
      .def_readwrite("pulse_width", &DriveWaveform::pulse_width)
      .def_readwrite("period", &DriveWaveform::period)
      .def_readwrite("phase", &DriveWaveform::phase)
      .def("validate", &DriveWaveform::validate)
      .def_static("dc", &DriveWaveform::dc, py::arg("rate"),
                  py::arg("analysis_period"))
      .def_static("pulsed", &DriveWaveform::pulsed, py::arg("period"),
                  py::arg("pulse_rate"), py::arg("pulse_width"),
                  py::arg("dc_floor") = 0.0, py::arg("phase") = 0.0);

  m.def("pump_rate_at", &pump_rate_at, py::arg("waveform"), py::arg("t"));
  m.def("generator", &generator, py::arg("params"), py::arg("pump"),
        "3x3 rate-equation generator over (G, X, XX); columns sum to zero");

  // ---- dynamics ----
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states);

  m.def("propagate", &propagate, py::arg("matrix"), py::arg("p0"),
        py::arg("dt"));
  m.def("evolve_cycles", &evolve_cycles, py::arg("params"), py::arg("waveform"),
        py::arg("p0"), py::arg("n_cycles"), py::arg("samples_per_cycle"));
  m.def("periodic_steady_state", &periodic_steady_state, py::arg("params"),
        py::arg("waveform"));
  m.def("dc_steady_state", &dc_steady_state, py::arg("params"), py::arg("pump"));

  // ---- metrics ----
  m.def("intrinsic_fidelity", &intrinsic_fidelity, py::arg("params"),
        py::arg("tau"));
  m.def("pair_visibility", &pair_visibility, py::arg("params"), py::arg("tau"));
  m.def("dc_pair_rate", &dc_pair_rate, py::arg("params"), py::arg("pump"),
        "Closed-form DC pair rate [pairs/ns]");
  m.def("cascade_photon_fraction", &cascade_photon_fraction, py::arg("params"),
        py::arg("pump"));

  py::enum_<PairAttribution>(m, "PairAttribution")
      .value("BY_FIRST_PHOTON", PairAttribution::ByFirstPhoton)
      .value("SAME_CYCLE_ONLY", PairAttribution::SameCycleOnly);

  py::class_<CycleModel>(m, "CycleModel")
      .def(py::init<const DeviceParams&, const DriveWaveform&>(),
           py::arg("params"), py::arg("waveform"))
      .def("at", &CycleModel::at, py::arg("t"))
      .def("xx_emission_rate", &CycleModel::xx_emission_rate, py::arg("t"))
      .def("x_emission_rate", &CycleModel::x_emission_rate, py::arg("t"))
      .def("survival", &CycleModel::survival, py::arg("t1"), py::arg("t2"))
      .def("daughter_yield", &CycleModel::daughter_yield, py::arg("t1"),
           py::arg("t_max"), py::arg("extra_rate") = 0.0)
      .def("pair_density", &CycleModel::pair_density, py::arg("t1"),
           py::arg("t2"))
      .def("pairs_per_cycle", &CycleModel::pairs_per_cycle,
           py::arg("attribution") = PairAttribution::ByFirstPhoton)
      .def("entangled_pairs_per_cycle", &CycleModel::entangled_pairs_per_cycle,
           py::arg("attribution") = PairAttribution::ByFirstPhoton);

  m.def("cascade_pair_density", &cascade_pair_density, py::arg("params"),
        py::arg("waveform"), py::arg("t1"), py::arg("t2"));
  m.def("pairs_per_cycle", &pairs_per_cycle, py::arg("params"),
        py::arg("waveform"),
        py::arg("attribution") = PairAttribution::ByFirstPhoton);
  m.def("pair_rate", &pair_rate, py::arg("params"), py::arg("waveform"),
        "Driven pair rate [pairs/ns]");

  py::class_<FidelityGrid>(m, "FidelityGrid")
      .def_readonly("bin", &FidelityGrid::bin)
      .def_readonly("period", &FidelityGrid::period)
      .def_readonly("horizon", &FidelityGrid::horizon)
      .def_readonly("n1", &FidelityGrid::n1)
      .def_readonly("n2", &FidelityGrid::n2)
      .def_readonly("f", &FidelityGrid::f)
      .def_readonly("weight", &FidelityGrid::weight)
      .def("at", &FidelityGrid::at, py::arg("i"), py::arg("j"));
  m.def("model_fidelity_map", &model_fidelity_map, py::arg("params"),
        py::arg("waveform"), py::arg("bin"), py::arg("horizon"));

  // ---- optimize ----
  py::class_<PumpOptimum>(m, "PumpOptimum")
      .def_readonly("pump", &PumpOptimum::pump)
      .def_readonly("rate", &PumpOptimum::rate);
  m.def("optimal_dc_pump", &optimal_dc_pump, py::arg("params"),
        py::arg("p_lo") = 1e-5, py::arg("p_hi") = 1.0, py::arg("n_scan") = 200);

  py::class_<ClockOptimum>(m, "ClockOptimum")
      .def_readonly("freq_ghz", &ClockOptimum::freq_ghz)
      .def_readonly("rate", &ClockOptimum::rate)
      .def_readonly("pairs_per_cycle", &ClockOptimum::pairs_per_cycle);
  m.def("optimal_clock_rate", &optimal_clock_rate, py::arg("params"),
        py::arg("waveform"), py::arg("f_lo_ghz") = 0.1,
        py::arg("f_hi_ghz") = 10.0, py::arg("n_scan") = 120);

  py::class_<BandResult>(m, "BandResult")
      .def_readonly("has_band", &BandResult::has_band)
      .def_readonly("f_low_ghz", &BandResult::f_low_ghz)
      .def_readonly("f_high_ghz", &BandResult::f_high_ghz)
      .def_readonly("low_edge_clipped", &BandResult::low_edge_clipped)
      .def_readonly("high_edge_clipped", &BandResult::high_edge_clipped)
      .def_readonly("f_optimal_ghz", &BandResult::f_optimal_ghz)
      .def_readonly("rate_at_optimal", &BandResult::rate_at_optimal)
      .def_readonly("dc_equilibrium_rate", &BandResult::dc_equilibrium_rate)
      .def_readonly("dc_pump", &BandResult::dc_pump)
      .def_readonly("enhancement", &BandResult::enhancement)
      .def_readonly("f_low_ideal_ghz", &BandResult::f_low_ideal_ghz)
      .def_readonly("f_high_ideal_ghz", &BandResult::f_high_ideal_ghz);
  m.def("superequilibrium_band", &superequilibrium_band, py::arg("params"),
        py::arg("waveform"), py::arg("f_lo_ghz") = 0.1,
        py::arg("f_hi_ghz") = 10.0, py::arg("n_scan") = 120);
  m.def("ideal_reset_pairs_per_cycle", &ideal_reset_pairs_per_cycle,
        py::arg("params"), py::arg("period"));

  // ---- montecarlo ----
  py::enum_<PhotonKind>(m, "PhotonKind")
      .value("BIEXCITON", PhotonKind::Biexciton)
      .value("EXCITON", PhotonKind::Exciton);
  py::enum_<Basis>(m, "Basis")
      .value("RECTILINEAR", Basis::Rectilinear)
      .value("DIAGONAL", Basis::Diagonal)
      .value("CIRCULAR", Basis::Circular);
  py::enum_<FrameMode>(m, "FrameMode")
      .value("ROTATING_BASIS", FrameMode::RotatingBasis)
      .value("STATIC_BASIS", FrameMode::StaticBasis);

  py::class_<EmissionEvent>(m, "EmissionEvent")
      .def_readonly("time", &EmissionEvent::time)
      .def_readonly("kind", &EmissionEvent::kind)
      .def_readonly("cascade_id", &EmissionEvent::cascade_id)
      .def_readonly("cycle_index", &EmissionEvent::cycle_index);

  m.def("simulate_emissions", &simulate_emissions, py::arg("params"),
        py::arg("waveform"), py::arg("duration"), py::arg("seed"),
        py::arg("initial") = Level::Ground);
  m.def("assign_polarizations", &assign_polarizations, py::arg("events"),
        py::arg("params"), py::arg("basis"), py::arg("mode"), py::arg("seed"));

  py::class_<DetectorModel>(m, "DetectorModel")
      .def(py::init<>())
      .def_readwrite("efficiency", &DetectorModel::efficiency)
      .def_readwrite("jitter_sigma", &DetectorModel::jitter_sigma)
      .def_readwrite("dark_rate", &DetectorModel::dark_rate)
      .def("validate", &DetectorModel::validate);

  py::class_<TimeTag>(m, "TimeTag")
      .def(py::init<>())
      .def(py::init([](uint64_t ts, uint8_t ch) {
             return TimeTag{ts, ch};
           }),
           py::arg("timestamp"), py::arg("channel"))
      .def_readwrite("timestamp", &TimeTag::timestamp)
      .def_readwrite("channel", &TimeTag::channel)
      .def("__repr__", [](const TimeTag& t) {
        std::ostringstream s;
        s << "TimeTag(" << t.timestamp << ", ch=" << int(t.channel) << ")";
        return s.str();
      });

  m.def("detect", &detect, py::arg("events"), py::arg("channels"),
        py::arg("detector"), py::arg("duration"), py::arg("seed"));

  // ---- tag files ----
  py::class_<TagStreamMeta>(m, "TagStreamMeta")
      .def(py::init<>())
      .def_readwrite("sync_period", &TagStreamMeta::sync_period)
      .def_readwrite("setting", &TagStreamMeta::setting)
      .def_property(
          "config",
          [](const TagStreamMeta& meta) { return meta.config.dump(); },
          [](TagStreamMeta& meta, const std::string& s) {
            meta.config = s.empty() ? nlohmann::json::object()
                                    : nlohmann::json::parse(s);
          });

  py::class_<TagStream>(m, "TagStream")
      .def_readonly("tags", &TagStream::tags)
      .def_readonly("meta", &TagStream::meta);

  m.def("write_timetags", &write_timetags, py::arg("path"), py::arg("tags"),
        py::arg("meta"));
  m.def("read_timetags", &read_timetags, py::arg("path"));

  // ---- analyzer ----
  py::class_<G2Histogram>(m, "G2Histogram")
      .def_readonly("bin_width", &G2Histogram::bin_width)
      .def_readonly("period", &G2Histogram::period)
      .def_readonly("tau", &G2Histogram::tau)
      .def_readonly("g2", &G2Histogram::g2)
      .def_readonly("center_integrated", &G2Histogram::center_integrated)
      .def_readonly("center_stderr", &G2Histogram::center_stderr);
  m.def("g2_auto", &g2_auto, py::arg("tags"), py::arg("channels"),
        py::arg("period"), py::arg("bin_width"), py::arg("norm_lo") = 5,
        py::arg("norm_hi") = 20);

  py::class_<CoincidenceMap>(m, "CoincidenceMap")
      .def_readonly("bin_width", &CoincidenceMap::bin_width)
      .def_readonly("period", &CoincidenceMap::period)
      .def_readonly("n_bins", &CoincidenceMap::n_bins)
      .def_readonly("span", &CoincidenceMap::span)
      .def_readonly("n_sync", &CoincidenceMap::n_sync)
      .def_readonly("n_first", &CoincidenceMap::n_first)
      .def_readonly("n_second", &CoincidenceMap::n_second)
      .def_readonly("setting", &CoincidenceMap::setting)
      .def("at", &CoincidenceMap::at, py::arg("offset"), py::arg("i"),
           py::arg("j"))
      .def("offset_total", &CoincidenceMap::offset_total, py::arg("offset"));
  m.def("coincidence_map", &coincidence_map, py::arg("tags"),
        py::arg("first_channels"), py::arg("second_channels"),
        py::arg("period"), py::arg("bin_width"), py::arg("span"),
        py::arg("setting") = "");
  m.def("coincidence_map_unpolarized", &coincidence_map_unpolarized,
        py::arg("tags"), py::arg("period"), py::arg("bin_width"),
        py::arg("span"));

  py::class_<Grid2D>(m, "Grid2D")
      .def_readonly("n_bins", &Grid2D::n_bins)
      .def_readonly("v", &Grid2D::v)
      .def("at", &Grid2D::at, py::arg("i"), py::arg("j"));
  m.def("accidental_floor", &accidental_floor, py::arg("map"),
        py::arg("norm_lo") = 5, py::arg("norm_hi") = 20);
  m.def("g2_cross_2d", &g2_cross_2d, py::arg("map"), py::arg("norm_lo") = 5,
        py::arg("norm_hi") = 20);

  py::class_<PolarizedMaps>(m, "PolarizedMaps")
      .def_readonly("co", &PolarizedMaps::co)
      .def_readonly("cross", &PolarizedMaps::cross)
      .def_readonly("basis_label", &PolarizedMaps::basis_label);
  m.def("polarized_maps", &polarized_maps, py::arg("tags"), py::arg("period"),
        py::arg("bin_width"), py::arg("span"), py::arg("basis_label") = "");

  m.def("contrast", &contrast, py::arg("co"), py::arg("cross"));

  py::class_<FidelitySettings>(m, "FidelitySettings")
      .def(py::init<>())
      .def_readwrite("fss_omega", &FidelitySettings::fss_omega)
      .def_readwrite("mode", &FidelitySettings::mode)
      .def_readwrite("min_counts", &FidelitySettings::min_counts)
      .def_readwrite("norm_lo", &FidelitySettings::norm_lo)
      .def_readwrite("norm_hi", &FidelitySettings::norm_hi);

  py::class_<FidelityMapResult>(m, "FidelityMapResult")
      .def_readonly("bin_width", &FidelityMapResult::bin_width)
      .def_readonly("period", &FidelityMapResult::period)
      .def_readonly("n_bins", &FidelityMapResult::n_bins)
      .def_readonly("offset", &FidelityMapResult::offset)
      .def_readonly("f", &FidelityMapResult::f)
      .def_readonly("stderr", &FidelityMapResult::stderr_)
      .def("at", &FidelityMapResult::at, py::arg("i"), py::arg("j"));
  m.def("fidelity_map", &fidelity_map, py::arg("rect"), py::arg("diag"),
        py::arg("circ"), py::arg("offset"), py::arg("settings"));

  py::class_<ValueWithError>(m, "ValueWithError")
      .def_readonly("value", &ValueWithError::value)
      .def_readonly("stderr", &ValueWithError::stderr_)
      .def_readonly("defined", &ValueWithError::defined)
      .def("__repr__", [](const ValueWithError& v) {
        std::ostringstream s;
        s << "ValueWithError(" << v.value << " +- " << v.stderr_
          << (v.defined ? "" : ", undefined") << ")";
        return s.str();
      });
  m.def("cycle_fidelity", &cycle_fidelity, py::arg("rect"), py::arg("diag"),
        py::arg("circ"), py::arg("offset"), py::arg("settings"));

  py::class_<DelayFidelity>(m, "DelayFidelity")
      .def_readonly("bin_width", &DelayFidelity::bin_width)
      .def_readonly("tau", &DelayFidelity::tau)
      .def_readonly("f", &DelayFidelity::f)
      .def_readonly("stderr", &DelayFidelity::stderr_)
      .def_readonly("weight", &DelayFidelity::weight);
  m.def("fidelity_vs_delay", &fidelity_vs_delay, py::arg("rect"),
        py::arg("diag"), py::arg("circ"), py::arg("settings"));

  py::class_<CumulativeCurve>(m, "CumulativeCurve")
      .def_readonly("t", &CumulativeCurve::t)
      .def_readonly("excess", &CumulativeCurve::excess)
      .def_readonly("per_total", &CumulativeCurve::per_total)
      .def_readonly("per_same_cycle", &CumulativeCurve::per_same_cycle)
      .def_readonly("total_excess", &CumulativeCurve::total_excess)
      .def_readonly("total_excess_var", &CumulativeCurve::total_excess_var)
      .def_readonly("total_coincidences", &CumulativeCurve::total_coincidences)
      .def_readonly("same_cycle_coincidences",
                    &CumulativeCurve::same_cycle_coincidences);
  m.def("cumulative_excess", &cumulative_excess, py::arg("rect"));

  py::class_<PairYieldComparison>(m, "PairYieldComparison")
      .def_readonly("driven", &PairYieldComparison::driven)
      .def_readonly("reference", &PairYieldComparison::reference)
      .def_readonly("ratio", &PairYieldComparison::ratio)
      .def_readonly("ratio_stderr", &PairYieldComparison::ratio_stderr);
  m.def("cumulative_pairs", &cumulative_pairs, py::arg("driven_rect"),
        py::arg("reference_rect"));

  py::class_<QberResult>(m, "QberResult")
      .def_readonly("qber", &QberResult::qber)
      .def_readonly("secure", &QberResult::secure);
  m.def("qber_from_fidelity", &qber_from_fidelity, py::arg("fidelity"));

  // ---- config & commands ----
  py::enum_<OutputFormat>(m, "OutputFormat")
      .value("CSV", OutputFormat::Csv)
      .value("JSON", OutputFormat::Json);

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_readwrite("duration", &SimulationConfig::duration)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def_readwrite("samples_per_cycle", &SimulationConfig::samples_per_cycle)
      .def_readwrite("n_cycles", &SimulationConfig::n_cycles)
      .def_readwrite("frame", &SimulationConfig::frame)
      .def_readwrite("initial", &SimulationConfig::initial);

  py::class_<AnalysisConfig>(m, "AnalysisConfig")
      .def(py::init<>())
      .def_readwrite("bin_width", &AnalysisConfig::bin_width)
      .def_readwrite("span", &AnalysisConfig::span)
      .def_readwrite("norm_lo", &AnalysisConfig::norm_lo)
      .def_readwrite("norm_hi", &AnalysisConfig::norm_hi)
      .def_readwrite("min_counts", &AnalysisConfig::min_counts)
      .def_readwrite("horizon_periods", &AnalysisConfig::horizon_periods)
      .def_readwrite("inputs", &AnalysisConfig::inputs);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("f_min_ghz", &SweepConfig::f_min_ghz)
      .def_readwrite("f_max_ghz", &SweepConfig::f_max_ghz)
      .def_readwrite("n_points", &SweepConfig::n_points);

  py::class_<OutputConfig>(m, "OutputConfig")
      .def(py::init<>())
      .def_readwrite("dir", &OutputConfig::dir)
      .def_readwrite("format", &OutputConfig::format);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("device", &RunConfig::device)
      .def_readwrite("waveform", &RunConfig::waveform)
      .def_readwrite("detector", &RunConfig::detector)
      .def_readwrite("simulation", &RunConfig::simulation)
      .def_readwrite("analysis", &RunConfig::analysis)
      .def_readwrite("sweep", &RunConfig::sweep)
      .def_readwrite("output", &RunConfig::output)
      .def("validate", &RunConfig::validate);

  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "config_from_json",
      [](const std::string& text) {
        return config_from_json(nlohmann::json::parse(text));
      },
      py::arg("text"), "Parse a configuration from a JSON string");
  m.def(
      "config_to_json",
      [](const RunConfig& cfg) { return config_to_json(cfg).dump(2); },
      py::arg("config"), "Serialize a configuration to a JSON string");
  m.def("config_hash", &config_hash, py::arg("config"));

  m.def("cmd_populations", &cmd_populations, py::arg("config"));
  m.def("cmd_sweep", &cmd_sweep, py::arg("config"));
  m.def("cmd_optimize", &cmd_optimize, py::arg("config"));
  m.def("cmd_montecarlo", &cmd_montecarlo, py::arg("config"));
  m.def("cmd_analyze", &cmd_analyze, py::arg("config"));
  m.def("cmd_compare", &cmd_compare, py::arg("config"));
}
