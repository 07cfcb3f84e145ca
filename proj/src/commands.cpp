#include "qdcascade/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdcascade/analyzer.hpp"
#include "qdcascade/dynamics.hpp"
#include "qdcascade/metrics.hpp"
#include "qdcascade/montecarlo.hpp"
#include "qdcascade/optimize.hpp"
#include "qdcascade/timetags.hpp"

using nlohmann::json;

namespace qdc {

namespace {

namespace fs = std::filesystem;

std::string _num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

std::string _out_path(const RunConfig& cfg, const std::string& file) {
  fs::create_directories(cfg.output.dir);
  return (fs::path(cfg.output.dir) / file).string();
}

// One numeric result table, exported as CSV (schema comment + header) or as
// a JSON object with the same schema tag.  NaN marks undefined cells; JSON
// renders them as null.
struct Table {
  std::string name;     // file stem and schema id
  int version = 1;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string _write_table(const RunConfig& cfg, const Table& t) {
  const std::string schema =
      "qdcascade." + t.name + ".v" + std::to_string(t.version);
  if (cfg.output.format == OutputFormat::Csv) {
    const std::string path = _out_path(cfg, t.name + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "# schema: " << schema << "\n";
    for (size_t c = 0; c < t.columns.size(); ++c)
      out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows) {
      for (size_t c = 0; c < row.size(); ++c)
        out << _num(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    return path;
  }
  const std::string path = _out_path(cfg, t.name + ".json");
  json j;
  j["schema"] = schema;
  j["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (double v : row) {
      if (std::isfinite(v))
        r.push_back(v);
      else
        r.push_back(nullptr);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  return path;
}

std::string _write_json(const RunConfig& cfg, const std::string& file,
                        const json& j) {
  const std::string path = _out_path(cfg, file);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  return path;
}

std::string _write_metadata(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.simulation.seed;
  j["config"] = config_to_json(cfg);
  return _write_json(cfg, "run_metadata.json", j);
}

// Mean radiative emission rates over one periodic-steady-state cycle,
// Simpson-integrated on a uniform grid: (xx [1/ps], x [1/ps]).
std::pair<double, double> _mean_emission_rates(const DeviceParams& params,
                                               const DriveWaveform& w) {
  const CycleModel cm(params, w);
  const int n = 4096;  // even
  const double h = w.period / n;
  double sxx = 0, sx = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(i * h, w.period * (1.0 - 1e-15));
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sxx += wgt * cm.xx_emission_rate(t);
    sx += wgt * cm.x_emission_rate(t);
  }
  return {sxx * h / 3.0 / w.period, sx * h / 3.0 / w.period};
}

std::string _basis_name(Basis b) {
  switch (b) {
    case Basis::Rectilinear: return "rectilinear";
    case Basis::Diagonal: return "diagonal";
    default: return "circular";
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> cmd_populations(const RunConfig& cfg) {
  cfg.validate();
  const Populations p0 = periodic_steady_state(cfg.device, cfg.waveform);
  const Trajectory traj =
      evolve_cycles(cfg.device, cfg.waveform, p0, cfg.simulation.n_cycles,
                    cfg.simulation.samples_per_cycle);

  Table t;
  t.name = "populations";
  t.columns = {"t_ps", "pump_per_ps", "p_ground", "p_exciton", "p_biexciton"};
  double max_ground = 0, max_residual = 0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double tt = traj.times[i];
    const Populations& p = traj.states[i];
    t.rows.push_back({tt, pump_rate_at(cfg.waveform, tt), p.g, p.x, p.xx});
    max_ground = std::max(max_ground, p.g);
    max_residual = std::max(max_residual, std::abs(p.sum() - 1.0));
  }

  const Populations p_end = traj.states.back();
  json summary;
  summary["period_ps"] = cfg.waveform.period;
  summary["steady_state_cycle_start"] = {p0.g, p0.x, p0.xx};
  summary["state_at_end"] = {p_end.g, p_end.x, p_end.xx};
  summary["max_p_ground"] = max_ground;
  summary["max_conservation_residual"] = max_residual;

  std::vector<std::string> paths;
  paths.push_back(_write_table(cfg, t));
  paths.push_back(_write_json(cfg, "populations_summary.json", summary));
  paths.push_back(_write_metadata(cfg, "populations"));
  return paths;
}

std::vector<std::string> cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const PumpOptimum dc = optimal_dc_pump(cfg.device);

  std::vector<double> grid;
  if (cfg.sweep.n_points == 1) {
    grid.push_back(cfg.sweep.f_min_ghz);
  } else {
    const double l0 = std::log(cfg.sweep.f_min_ghz);
    const double l1 = std::log(cfg.sweep.f_max_ghz);
    for (int i = 0; i < cfg.sweep.n_points; ++i)
      grid.push_back(std::exp(l0 + (l1 - l0) * i / (cfg.sweep.n_points - 1)));
  }

  Table t;
  t.name = "sweep";
  t.columns = {"f_ghz",      "period_ps", "pairs_per_cycle",
               "pair_rate_per_ns", "dc_optimal_rate_per_ns", "exceeds_dc",
               "is_max"};
  double best_rate = -1;
  size_t best_row = 0;
  for (double f : grid) {
    DriveWaveform w = cfg.waveform;
    w.period = 1000.0 / f;
    if (w.pulse_width > w.period || w.phase >= w.period) continue;  // pulse no longer fits
    const double per_cycle = pairs_per_cycle(cfg.device, w);
    const double rate = per_cycle / w.period * 1000.0;
    t.rows.push_back({f, w.period, per_cycle, rate, dc.rate,
                      rate > dc.rate ? 1.0 : 0.0, 0.0});
    if (rate > best_rate) {
      best_rate = rate;
      best_row = t.rows.size() - 1;
    }
  }
  if (!t.rows.empty()) t.rows[best_row][6] = 1.0;

  json summary;
  summary["dc_optimal_pump_per_ps"] = dc.pump;
  summary["dc_optimal_rate_per_ns"] = dc.rate;
  summary["n_rows"] = t.rows.size();
  if (!t.rows.empty()) {
    summary["scan_max_f_ghz"] = t.rows[best_row][0];
    summary["scan_max_rate_per_ns"] = best_rate;
  }
  if (cfg.sweep.n_points >= 2) {
    const BandResult band = superequilibrium_band(
        cfg.device, cfg.waveform, cfg.sweep.f_min_ghz, cfg.sweep.f_max_ghz);
    summary["band"] = {{"has_band", band.has_band},
                       {"f_low_ghz", band.f_low_ghz},
                       {"f_high_ghz", band.f_high_ghz},
                       {"low_edge_clipped", band.low_edge_clipped},
                       {"high_edge_clipped", band.high_edge_clipped},
                       {"f_optimal_ghz", band.f_optimal_ghz},
                       {"enhancement", band.enhancement}};
  }

  std::vector<std::string> paths;
  paths.push_back(_write_table(cfg, t));
  paths.push_back(_write_json(cfg, "sweep_summary.json", summary));
  paths.push_back(_write_metadata(cfg, "sweep"));
  return paths;
}

std::vector<std::string> cmd_optimize(const RunConfig& cfg) {
  cfg.validate();
  const BandResult band = superequilibrium_band(
      cfg.device, cfg.waveform, cfg.sweep.f_min_ghz, cfg.sweep.f_max_ghz,
      cfg.sweep.n_points);

  json j;
  j["has_band"] = band.has_band;
  j["f_low_ghz"] = band.f_low_ghz;
  j["f_high_ghz"] = band.f_high_ghz;
  j["low_edge_clipped"] = band.low_edge_clipped;
  j["high_edge_clipped"] = band.high_edge_clipped;
  j["f_optimal_ghz"] = band.f_optimal_ghz;
  j["rate_at_optimal_per_ns"] = band.rate_at_optimal;
  j["pairs_per_cycle_at_optimal"] =
      band.f_optimal_ghz > 0 ? band.rate_at_optimal / band.f_optimal_ghz : 0.0;
  j["dc_equilibrium_rate_per_ns"] = band.dc_equilibrium_rate;
  j["dc_optimal_pump_per_ps"] = band.dc_pump;
  j["enhancement"] = band.enhancement;
  j["cascade_photon_fraction_at_dc_optimum"] =
      cascade_photon_fraction(cfg.device, band.dc_pump);
  j["ideal_reset"] = {{"f_low_ghz", band.f_low_ideal_ghz},
                      {"f_high_ghz", band.f_high_ideal_ghz}};

  std::vector<std::string> paths;
  paths.push_back(_write_json(cfg, "band.json", j));
  paths.push_back(_write_metadata(cfg, "optimize"));
  return paths;
}

std::vector<std::string> cmd_montecarlo(const RunConfig& cfg) {
  cfg.validate();
  const double duration = cfg.simulation.duration;
  const uint64_t seed = cfg.simulation.seed;
  const std::string ext = cfg.output.format == OutputFormat::Csv ? ".csv" : ".bin";

  const auto [mean_xx, mean_x] = _mean_emission_rates(cfg.device, cfg.waveform);

  std::vector<std::string> paths;
  json summary;
  summary["duration_ps"] = duration;
  summary["frame"] = cfg.simulation.frame == FrameMode::RotatingBasis
                         ? "rotating"
                         : "static";
  summary["expected_singles_per_ns"] = {{"xx", mean_xx * 1e3},
                                        {"x", mean_x * 1e3}};

  for (Basis basis : {Basis::Rectilinear, Basis::Diagonal, Basis::Circular}) {
    const int k = static_cast<int>(basis);
    // Each basis is an independent acquisition: distinct substream seeds for
    // the trajectory, the polarization outcomes, and the detector.
    const uint64_t seed_emit = seed + 3 * k;
    const uint64_t seed_pol = seed + 3 * k + 1;
    const uint64_t seed_det = seed + 3 * k + 2;

    const std::vector<EmissionEvent> events = simulate_emissions(
        cfg.device, cfg.waveform, duration, seed_emit, cfg.simulation.initial);
    const std::vector<uint8_t> channels = assign_polarizations(
        events, cfg.device, basis, cfg.simulation.frame, seed_pol);
    const std::vector<TimeTag> tags =
        detect(events, channels, cfg.detector, duration, seed_det);

    TagStreamMeta meta;
    meta.sync_period = cfg.waveform.period;
    meta.setting = _basis_name(basis);
    meta.config = {{"command", "montecarlo"},
                   {"tool_version", kToolVersion},
                   {"config_hash", config_hash(cfg)},
                   {"seed_emissions", seed_emit},
                   {"seed_polarization", seed_pol},
                   {"seed_detector", seed_det},
                   {"config", config_to_json(cfg)}};

    const std::string path =
        _out_path(cfg, "tags_" + _basis_name(basis) + ext);
    write_timetags(path, tags, meta);
    paths.push_back(path);
    paths.push_back(path + ".meta.json");

    std::array<uint64_t, kChannels> per_channel{};
    for (const TimeTag& tg : tags) ++per_channel[tg.channel];
    uint64_t linked = 0;
    for (const EmissionEvent& e : events)
      if (e.cascade_id >= 0) ++linked;
    summary[_basis_name(basis)] = {
        {"n_emissions", events.size()},
        {"n_linked_emissions", linked},
        {"n_tags", tags.size()},
        {"tags_per_channel", per_channel},
        {"singles_per_ns",
         duration > 0 ? json({{"xx", (per_channel[0] + per_channel[1]) /
                                         duration * 1e3},
                              {"x", (per_channel[2] + per_channel[3]) /
                                        duration * 1e3}})
                      : json({{"xx", 0.0}, {"x", 0.0}})}};
  }

  paths.push_back(_write_json(cfg, "montecarlo_summary.json", summary));
  paths.push_back(_write_metadata(cfg, "montecarlo"));
  return paths;
}

// ---------------------------------------------------------------------------

namespace {

struct LoadedStreams {
  std::vector<TagStream> all;
  int rect = -1, diag = -1, circ = -1;  // indices into `all`, -1 = absent
  int primary = -1;                     // rect if present, else first
  double period = 0;
};

LoadedStreams _load_streams(const RunConfig& cfg) {
  if (cfg.analysis.inputs.empty())
    throw std::invalid_argument(
        "analyze: analysis.inputs must list at least one tag file");
  LoadedStreams ls;
  for (const std::string& path : cfg.analysis.inputs) {
    TagStream s = read_timetags(path);
    const int idx = static_cast<int>(ls.all.size());
    if (s.meta.setting == "rectilinear") ls.rect = idx;
    else if (s.meta.setting == "diagonal") ls.diag = idx;
    else if (s.meta.setting == "circular") ls.circ = idx;
    ls.all.push_back(std::move(s));
  }
  ls.primary = ls.rect >= 0 ? ls.rect : 0;
  ls.period = ls.all[ls.primary].meta.sync_period > 0
                  ? ls.all[ls.primary].meta.sync_period
                  : cfg.waveform.period;
  return ls;
}

Table _g2_table(const std::string& name, const G2Histogram& g) {
  Table t;
  t.name = name;
  t.columns = {"tau_ps", "g2"};
  for (size_t i = 0; i < g.tau.size(); ++i) t.rows.push_back({g.tau[i], g.g2[i]});
  return t;
}

Table _cumulative_table(const std::string& name, const CumulativeCurve& c) {
  Table t;
  t.name = name;
  t.columns = {"t_ps", "excess", "per_total_coincidence",
               "per_same_cycle_coincidence"};
  for (size_t i = 0; i < c.t.size(); ++i)
    t.rows.push_back({c.t[i], c.excess[i], c.per_total[i], c.per_same_cycle[i]});
  return t;
}

}  // namespace

std::vector<std::string> cmd_analyze(const RunConfig& cfg) {
  cfg.validate();
  const LoadedStreams ls = _load_streams(cfg);
  const AnalysisConfig& ac = cfg.analysis;
  const double period = ls.period;
  const std::vector<TimeTag>& primary = ls.all[ls.primary].tags;

  std::vector<std::string> paths;
  json summary;
  summary["period_ps"] = period;
  summary["n_streams"] = ls.all.size();

  // Autocorrelations of each transition on the primary stream.
  const G2Histogram g2xx = g2_auto(primary, {0, 1}, period, ac.bin_width,
                                   ac.norm_lo, ac.norm_hi);
  const G2Histogram g2x = g2_auto(primary, {2, 3}, period, ac.bin_width,
                                  ac.norm_lo, ac.norm_hi);
  paths.push_back(_write_table(cfg, _g2_table("g2_xx", g2xx)));
  paths.push_back(_write_table(cfg, _g2_table("g2_x", g2x)));
  summary["g2_center_xx"] = {{"value", g2xx.center_integrated},
                             {"stderr", g2xx.center_stderr}};
  summary["g2_center_x"] = {{"value", g2x.center_integrated},
                            {"stderr", g2x.center_stderr}};

  // Cross-correlation map, all XX tags against all X tags.
  const CoincidenceMap unpol =
      coincidence_map_unpolarized(primary, period, ac.bin_width, ac.span);
  const Grid2D floor = accidental_floor(unpol, ac.norm_lo, ac.norm_hi);
  const Grid2D g2map = g2_cross_2d(unpol, ac.norm_lo, ac.norm_hi);
  {
    Table t;
    t.name = "g2_map";
    t.columns = {"t1_ps", "t2_ps", "counts", "accidental_floor", "g2"};
    for (int i = 0; i < unpol.n_bins; ++i)
      for (int j = 0; j < unpol.n_bins; ++j)
        t.rows.push_back({(i + 0.5) * ac.bin_width, (j + 0.5) * ac.bin_width,
                          static_cast<double>(unpol.at(0, i, j)),
                          floor.at(i, j), g2map.at(i, j)});
    paths.push_back(_write_table(cfg, t));
  }

  // Model prediction for the same-cycle fidelity map (figure reference data).
  {
    const FidelityGrid fg = model_fidelity_map(
        cfg.device, cfg.waveform, ac.bin_width,
        ac.horizon_periods * cfg.waveform.period);
    Table t;
    t.name = "model_fidelity_map";
    t.columns = {"t1_ps", "t2_ps", "fidelity", "pair_weight_per_ps2"};
    for (int i = 0; i < fg.n1; ++i)
      for (int j = 0; j < fg.n2; ++j)
        t.rows.push_back({(i + 0.5) * fg.bin, (j + 0.5) * fg.bin, fg.at(i, j),
                          fg.weight[static_cast<size_t>(i) * fg.n2 + j]});
    paths.push_back(_write_table(cfg, t));
  }

  const bool have_bases = ls.rect >= 0 && ls.diag >= 0 && ls.circ >= 0;
  summary["polarized_analysis"] = have_bases;
  if (have_bases) {
    const PolarizedMaps pr = polarized_maps(ls.all[ls.rect].tags, period,
                                            ac.bin_width, ac.span, "rectilinear");
    const PolarizedMaps pd = polarized_maps(ls.all[ls.diag].tags, period,
                                            ac.bin_width, ac.span, "diagonal");
    const PolarizedMaps pc = polarized_maps(ls.all[ls.circ].tags, period,
                                            ac.bin_width, ac.span, "circular");
    FidelitySettings fs;
    fs.fss_omega = cfg.device.fss_omega;
    fs.mode = cfg.simulation.frame;
    fs.min_counts = ac.min_counts;
    fs.norm_lo = ac.norm_lo;
    fs.norm_hi = ac.norm_hi;

    const FidelityMapResult fm = fidelity_map(pr, pd, pc, 0, fs);
    {
      Table t;
      t.name = "fidelity_map";
      t.columns = {"t1_ps", "t2_ps", "fidelity", "stderr"};
      for (int i = 0; i < fm.n_bins; ++i)
        for (int j = 0; j < fm.n_bins; ++j)
          t.rows.push_back({(i + 0.5) * ac.bin_width, (j + 0.5) * ac.bin_width,
                            fm.at(i, j),
                            fm.stderr_[static_cast<size_t>(i) * fm.n_bins + j]});
      paths.push_back(_write_table(cfg, t));
    }

    {
      Table t;
      t.name = "cycle_fidelity";
      t.columns = {"cycle_offset", "fidelity", "stderr", "coincidences"};
      for (int off = -ac.span; off <= ac.span; ++off) {
        const ValueWithError fe = cycle_fidelity(pr, pd, pc, off, fs);
        const double weight = static_cast<double>(
            pr.co.offset_total(off) + pr.cross.offset_total(off) +
            pd.co.offset_total(off) + pd.cross.offset_total(off) +
            pc.co.offset_total(off) + pc.cross.offset_total(off));
        t.rows.push_back({static_cast<double>(off),
                          fe.defined ? fe.value : std::nan(""),
                          fe.defined ? fe.stderr_ : std::nan(""), weight});
      }
      paths.push_back(_write_table(cfg, t));
    }

    const DelayFidelity df = fidelity_vs_delay(pr, pd, pc, fs);
    {
      Table t;
      t.name = "fidelity_vs_delay";
      t.columns = {"tau_ps", "fidelity", "stderr", "coincidences"};
      for (size_t i = 0; i < df.tau.size(); ++i)
        t.rows.push_back({df.tau[i], df.f[i], df.stderr_[i],
                          static_cast<double>(df.weight[i])});
      paths.push_back(_write_table(cfg, t));
    }

    const CumulativeCurve cum = cumulative_excess(pr);
    paths.push_back(_write_table(cfg, _cumulative_table("cumulative_pairs", cum)));

    const ValueWithError f0 = cycle_fidelity(pr, pd, pc, 0, fs);
    summary["same_cycle_fidelity"] = {
        {"value", f0.defined ? json(f0.value) : json(nullptr)},
        {"stderr", f0.defined ? json(f0.stderr_) : json(nullptr)}};
    if (f0.defined) {
      const QberResult q = qber_from_fidelity(std::clamp(f0.value, 0.0, 1.0));
      summary["qber"] = {{"value", q.qber},
                         {"stderr", 2.0 / 3.0 * f0.stderr_},
                         {"secure", q.secure},
                         {"threshold", kQberSecureThreshold}};
    }
    summary["entangled_pair_excess"] = {
        {"total", cum.total_excess},
        {"stderr", std::sqrt(cum.total_excess_var)},
        {"per_total_coincidence",
         cum.total_coincidences > 0
             ? json(cum.total_excess / cum.total_coincidences)
             : json(nullptr)},
        {"per_same_cycle_coincidence",
         cum.same_cycle_coincidences > 0
             ? json(cum.total_excess / cum.same_cycle_coincidences)
             : json(nullptr)}};
  }

  paths.push_back(_write_json(cfg, "analysis_summary.json", summary));
  paths.push_back(_write_metadata(cfg, "analyze"));
  return paths;
}

std::vector<std::string> cmd_compare(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.analysis.inputs.size() != 2)
    throw std::invalid_argument(
        "compare: analysis.inputs must list exactly two tag files "
        "(driven, reference)");
  const AnalysisConfig& ac = cfg.analysis;

  const TagStream driven = read_timetags(cfg.analysis.inputs[0]);
  const TagStream reference = read_timetags(cfg.analysis.inputs[1]);
  const double period_d =
      driven.meta.sync_period > 0 ? driven.meta.sync_period : cfg.waveform.period;
  const double period_r = reference.meta.sync_period > 0
                              ? reference.meta.sync_period
                              : cfg.waveform.period;

  const PolarizedMaps pm_d =
      polarized_maps(driven.tags, period_d, ac.bin_width, ac.span, "driven");
  const PolarizedMaps pm_r = polarized_maps(reference.tags, period_r,
                                            ac.bin_width, ac.span, "reference");
  const PairYieldComparison cmp = cumulative_pairs(pm_d, pm_r);

  std::vector<std::string> paths;
  paths.push_back(
      _write_table(cfg, _cumulative_table("cumulative_driven", cmp.driven)));
  paths.push_back(_write_table(
      cfg, _cumulative_table("cumulative_reference", cmp.reference)));

  const double dur_d = pm_d.co.n_sync * period_d;
  const double dur_r = pm_r.co.n_sync * period_r;
  json j;
  j["driven"] = {{"input", cfg.analysis.inputs[0]},
                 {"period_ps", period_d},
                 {"duration_ps", dur_d},
                 {"total_excess", cmp.driven.total_excess},
                 {"excess_stderr", std::sqrt(cmp.driven.total_excess_var)},
                 {"excess_per_ns",
                  dur_d > 0 ? cmp.driven.total_excess / dur_d * 1e3 : 0.0}};
  j["reference"] = {{"input", cfg.analysis.inputs[1]},
                    {"period_ps", period_r},
                    {"duration_ps", dur_r},
                    {"total_excess", cmp.reference.total_excess},
                    {"excess_stderr", std::sqrt(cmp.reference.total_excess_var)},
                    {"excess_per_ns",
                     dur_r > 0 ? cmp.reference.total_excess / dur_r * 1e3 : 0.0}};
  j["excess_ratio"] = std::isfinite(cmp.ratio) ? json(cmp.ratio) : json(nullptr);
  j["excess_ratio_stderr"] =
      std::isfinite(cmp.ratio_stderr) ? json(cmp.ratio_stderr) : json(nullptr);
  if (dur_d > 0 && dur_r > 0 && cmp.reference.total_excess != 0) {
    const double rate_ratio =
        (cmp.driven.total_excess / dur_d) / (cmp.reference.total_excess / dur_r);
    j["rate_ratio"] = rate_ratio;
    j["rate_ratio_stderr"] = std::isfinite(cmp.ratio) && cmp.ratio != 0
                                 ? std::abs(rate_ratio) *
                                       (cmp.ratio_stderr / std::abs(cmp.ratio))
                                 : 0.0;
  }
  paths.push_back(_write_json(cfg, "compare_summary.json", j));
  paths.push_back(_write_metadata(cfg, "compare"));
  return paths;
}

}  // namespace qdc
