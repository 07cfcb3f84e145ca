// Acceptance gate: one binary, twelve checks, one PASS/FAIL line each.
// Exit code is the number of failed checks.  Every threshold is written out
// in the printed detail so a log line is self-contained.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qdcascade/analyzer.hpp"
#include "qdcascade/dynamics.hpp"
#include "qdcascade/metrics.hpp"
#include "qdcascade/model.hpp"
#include "qdcascade/montecarlo.hpp"
#include "qdcascade/optimize.hpp"
#include "qdcascade/timetags.hpp"

using namespace qdc;

namespace {

int g_failures = 0;

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class Fn>
void run_check(int id, const char* label, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = fmt("exception: %s", e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%02d] %s %s — %s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL",
              label, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

const DeviceParams kParams;  // 300 ps / 500 ps lifetimes, no tunneling
const DriveWaveform kPulseShape = DriveWaveform::pulsed(787.0, 0.2, 50.0);
constexpr double kT = 787.0;

// Shared Monte Carlo streams for the rate checks: one driven and one constant
// pump run of a million analysis frames each.
struct StreamBundle {
  DriveWaveform wave = kPulseShape;
  uint64_t n_cycles = 0;
  uint64_t linked = 0;  // completed two-photon cascades
  PolarizedMaps maps;   // rectilinear co/cross maps, span 20, 16 ps bins
};

const StreamBundle& driven_stream();
const StreamBundle& constant_stream();

StreamBundle make_stream(const DriveWaveform& w, uint64_t n_cycles,
                         uint64_t seed) {
  StreamBundle s;
  s.wave = w;
  s.n_cycles = n_cycles;
  const double duration = static_cast<double>(n_cycles) * kT;
  const auto events = simulate_emissions(kParams, w, duration, seed);
  for (const auto& e : events)
    if (e.kind == PhotonKind::Biexciton && e.cascade_id >= 0) ++s.linked;
  const auto ch = assign_polarizations(events, kParams, Basis::Rectilinear,
                                       FrameMode::RotatingBasis, seed + 1);
  DetectorModel ideal;
  const auto tags = detect(events, ch, ideal, duration, seed + 2);
  s.maps = polarized_maps(tags, kT, 16.0, 20, "rectilinear");
  return s;
}

const StreamBundle& driven_stream() {
  static const StreamBundle s = make_stream(kPulseShape, 1000000, 71001);
  return s;
}

const StreamBundle& constant_stream() {
  static const StreamBundle s = make_stream(
      DriveWaveform::dc(optimal_dc_pump(kParams).pump, kT), 1000000, 72001);
  return s;
}

}  // namespace

int main() {
  std::printf("acceptance checks: cascade reset driving toolkit\n");

  run_check(1, "analytic cascade fraction at the dc optimum", [] {
    const auto opt = optimal_dc_pump(kParams);
    const double frac = cascade_photon_fraction(kParams, opt.pump);
    Outcome o;
    o.pass = std::abs(frac - 0.43) <= 0.02;
    o.detail = fmt("fraction %.4f at pump %.6g /ps (target 0.43 +- 0.02)",
                   frac, opt.pump);
    return o;
  });

  run_check(2, "optimal reset clock frequency", [] {
    const auto clk = optimal_clock_rate(kParams, kPulseShape);
    Outcome o;
    o.pass = clk.freq_ghz >= 1.0 && clk.freq_ghz <= 1.7;
    o.detail = fmt("f_opt %.4f GHz, %.4f pairs/ns (window [1.0, 1.7] GHz)",
                   clk.freq_ghz, clk.rate);
    return o;
  });

  run_check(3, "pair-rate enhancement over the dc optimum", [] {
    const auto band = superequilibrium_band(kParams, kPulseShape);
    Outcome o;
    o.pass = band.has_band && band.enhancement >= 0.30 &&
             band.enhancement <= 0.60;
    o.detail = fmt(
        "enhancement %.4f (driven %.4f vs dc %.4f pairs/ns; window "
        "[0.30, 0.60])",
        band.enhancement, band.rate_at_optimal, band.dc_equilibrium_rate);
    return o;
  });

  run_check(4, "edges of the above-dc frequency band", [] {
    const auto band = superequilibrium_band(kParams, kPulseShape);
    Outcome o;
    const bool low_ok = band.has_band && !band.low_edge_clipped &&
                        std::abs(band.f_low_ghz - 0.52) <= 0.2 * 0.52;
    const bool high_ok = band.has_band && band.f_high_ghz >= 3.07 / 2.0 &&
                         band.f_high_ghz <= 3.07 * 2.0;
    o.pass = low_ok && high_ok;
    o.detail = fmt(
        "band %.4f-%.4f GHz (low target 0.52 +- 20%%, high within x2 of "
        "3.07); instantaneous-reset limit %.4f-%.4f GHz",
        band.f_low_ghz, band.f_high_ghz, band.f_low_ideal_ghz,
        band.f_high_ideal_ghz);
    return o;
  });

  run_check(5, "pairs per cycle: slow-clock ceiling and optimum", [] {
    const auto w250 = DriveWaveform::pulsed(4000.0, 0.2, 50.0);
    const double ppc250 = pairs_per_cycle(kParams, w250);
    const auto clk = optimal_clock_rate(kParams, kPulseShape);
    Outcome o;
    const bool slow_ok = ppc250 >= 0.95;
    const bool opt_ok = std::abs(clk.pairs_per_cycle - 0.56) <= 0.08;
    o.pass = slow_ok && opt_ok;
    o.detail = fmt(
        "%.4f pairs/cycle at 250 MHz (>= 0.95); %.4f at f_opt %.3f GHz "
        "(target 0.56 +- 0.08)",
        ppc250, clk.pairs_per_cycle, clk.freq_ghz);
    return o;
  });

  run_check(6, "ground-state population stays useful at the optimum", [] {
    const auto clk = optimal_clock_rate(kParams, kPulseShape);
    const auto w =
        DriveWaveform::pulsed(1000.0 / clk.freq_ghz, 0.2, 50.0);
    const auto pss = periodic_steady_state(kParams, w);
    const auto traj = evolve_cycles(kParams, w, pss, 1, 400);
    double max_g = 0;
    for (const auto& st : traj.states) max_g = std::max(max_g, st.g);
    Outcome o;
    o.pass = max_g <= 0.60;
    o.detail = fmt("max ground population %.4f over one cycle (<= 0.60)",
                   max_g);
    return o;
  });

  run_check(7, "simulated two-photon yield matches the rate equations", [] {
    const auto& ar = driven_stream();
    const auto& dc = constant_stream();
    Outcome o;
    o.pass = true;
    std::string parts;
    for (const StreamBundle* s : {&ar, &dc}) {
      const double expected =
          pairs_per_cycle(kParams, s->wave, PairAttribution::ByFirstPhoton) *
          static_cast<double>(s->n_cycles);
      const double sigma = std::sqrt(expected);
      const double dev = (static_cast<double>(s->linked) - expected) / sigma;
      if (std::abs(dev) > 3.0) o.pass = false;
      parts += fmt("%s %llu vs %.0f (%+.2f sigma); ",
                   s == &ar ? "driven" : "dc",
                   static_cast<unsigned long long>(s->linked), expected, dev);
    }
    o.detail = parts + fmt("1e6 cycles each, 3 sigma gate");
    return o;
  });

  run_check(8, "programmed entangled stream is recovered by the pipeline", [] {
    const double f_target = 0.795;
    orc::WernerStreamSpec spec;
    spec.V = (4.0 * f_target - 1.0) / 3.0;
    std::mt19937_64 rng(88001);
    PolarizedMaps maps[3];
    const char* labels[3] = {"rectilinear", "diagonal", "circular"};
    const Basis bases[3] = {Basis::Rectilinear, Basis::Diagonal,
                            Basis::Circular};
    for (int k = 0; k < 3; ++k) {
      spec.basis = bases[k];
      const auto tags = orc::werner_pair_tags(spec, 60000, rng);
      maps[k] = polarized_maps(tags, spec.period, 16.0, 1, labels[k]);
    }
    FidelitySettings fs;
    const auto f = cycle_fidelity(maps[0], maps[1], maps[2], 0, fs);
    Outcome o;
    if (!f.defined) {
      o.detail = "fidelity undefined (insufficient counts)";
      return o;
    }
    const auto q = qber_from_fidelity(f.value);
    const bool f_ok = std::abs(f.value - f_target) <= 0.01;
    const bool q_ok = std::abs(q.qber - 0.1367) <= 0.005 && q.secure;
    o.pass = f_ok && q_ok;
    o.detail = fmt(
        "fidelity %.4f +- %.4f (target %.3f +- 0.010); qber %.4f "
        "(target 0.1367 +- 0.005, secure=%s)",
        f.value, f.stderr_, f_target, q.qber, q.secure ? "yes" : "no");
    return o;
  });

  run_check(9, "reset isolates cycles: cross-cycle fidelity is flat 1/4", [] {
    const double duration = 6e7;
    const auto events = simulate_emissions(kParams, kPulseShape, duration,
                                           90001);
    PolarizedMaps maps[3];
    const char* labels[3] = {"rectilinear", "diagonal", "circular"};
    const Basis bases[3] = {Basis::Rectilinear, Basis::Diagonal,
                            Basis::Circular};
    DetectorModel ideal;
    for (int k = 0; k < 3; ++k) {
      const auto ch = assign_polarizations(events, kParams, bases[k],
                                           FrameMode::RotatingBasis,
                                           90100 + k);
      const auto tags = detect(events, ch, ideal, duration, 90200 + k);
      maps[k] = polarized_maps(tags, kT, 16.0, 6, labels[k]);
    }
    FidelitySettings fs;
    Outcome o;
    o.pass = true;
    double worst = 0;
    int worst_n = 0;
    for (int n = -5; n <= 5; ++n) {
      if (n == 0) continue;
      const auto f = cycle_fidelity(maps[0], maps[1], maps[2], n, fs);
      if (!f.defined) {
        o.pass = false;
        o.detail = fmt("offset %d undefined", n);
        return o;
      }
      const double dev = std::abs(f.value - 0.25);
      if (dev > worst) {
        worst = dev;
        worst_n = n;
      }
      if (dev > 0.01) o.pass = false;
    }
    o.detail = fmt(
        "offsets 1..5 cycles both signs: worst |f - 0.25| = %.4f at "
        "offset %+d (<= 0.010)",
        worst, worst_n);
    return o;
  });

  run_check(10, "g2 conventions: flat, antibunched, and mixed sources", [] {
    std::mt19937_64 rng(100001);
    Outcome o;

    const auto flat_tags = orc::poisson_tags(0.002, 1.2e9, 0, rng);
    const auto flat = g2_auto(flat_tags, {0}, kT, 16.0);
    double worst_bin = 0;
    for (double v : flat.g2) worst_bin = std::max(worst_bin, std::abs(v - 1.0));
    const bool flat_ok =
        worst_bin <= 0.02 && std::abs(flat.center_integrated - 1.0) <= 0.02;

    const auto single = orc::single_emitter_tags(kT, 200000, 50.0, 0, rng);
    const auto anti = g2_auto(single, {0}, kT, 16.0);
    const bool anti_ok = anti.center_integrated <= 0.01;

    const double beta = 0.15;
    auto mixed = orc::single_emitter_tags(kT, 200000, 50.0, 0, rng);
    const auto bg = orc::poisson_tags(beta / (1.0 - beta) / kT,
                                      200000 * kT, 0, rng);
    mixed.insert(mixed.end(), bg.begin(), bg.end());
    orc::sort_tags(mixed);
    const auto mix = g2_auto(mixed, {0}, kT, 16.0);
    const double mix_target = beta * (2.0 - beta);
    const bool mix_ok = std::abs(mix.center_integrated - mix_target) <= 0.02;

    o.pass = flat_ok && anti_ok && mix_ok;
    o.detail = fmt(
        "poisson: worst bin dev %.4f, center %.4f (+- 0.02); single emitter "
        "center %.5f (<= 0.01); 15%% background center %.4f vs %.4f (+- 0.02)",
        worst_bin, flat.center_integrated, anti.center_integrated,
        mix.center_integrated, mix_target);
    return o;
  });

  run_check(11, "numerical integrity of the deterministic engine", [] {
    Outcome o;

    // Probability conservation along a ten-cycle trajectory.
    Populations p0;
    p0.g = 1;
    p0.x = 0;
    p0.xx = 0;
    const auto traj = evolve_cycles(kParams, kPulseShape, p0, 10, 200);
    double cons = 0;
    for (const auto& st : traj.states)
      cons = std::max(cons, std::abs(st.sum() - 1.0));

    // Piecewise-exact propagation against fixed-step RK4 on random drives.
    std::mt19937_64 rng(110001);
    auto uni = [&](double lo, double hi) {
      return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
    };
    double worst_rk4 = 0;
    for (int trial = 0; trial < 100; ++trial) {
      DriveWaveform w;
      w.period = uni(300.0, 1500.0);
      w.pulse_width = uni(10.0, 0.45 * w.period);
      w.pulse_rate = std::pow(10.0, uni(-3.0, 0.0));
      w.dc_rate = trial % 2 == 0 ? 0.0 : std::pow(10.0, uni(-5.0, -2.0));
      w.phase = uni(0.0, w.period);
      Populations q0;
      q0.g = uni(0.0, 1.0);
      q0.x = uni(0.0, 1.0 - q0.g);
      q0.xx = 1.0 - q0.g - q0.x;
      const auto got = evolve_cycles(kParams, w, q0, 2, 40);
      const auto r = orc::rates_of(kParams);
      const auto wave = orc::wave_of(w);
      orc::State s{q0.g, q0.x, q0.xx};
      s = orc::rk4_span(r, wave, s, 0.0, 2.0 * w.period, 0.02);
      const auto& fin = got.states.back();
      worst_rk4 = std::max({worst_rk4, std::abs(fin.g - s[0]),
                            std::abs(fin.x - s[1]), std::abs(fin.xx - s[2])});
    }

    // Periodic steady state really is periodic.
    const auto pss = periodic_steady_state(kParams, kPulseShape);
    const auto one = evolve_cycles(kParams, kPulseShape, pss, 1, 100);
    const auto& endst = one.states.back();
    const double residual =
        std::max({std::abs(endst.g - pss.g), std::abs(endst.x - pss.x),
                  std::abs(endst.xx - pss.xx)});

    // Bit-identical reruns of the stochastic chain, in memory and on disk.
    const double dur = 2e6;
    const auto ev1 = simulate_emissions(kParams, kPulseShape, dur, 117);
    const auto ev2 = simulate_emissions(kParams, kPulseShape, dur, 117);
    bool identical = ev1.size() == ev2.size();
    for (size_t i = 0; identical && i < ev1.size(); ++i)
      identical = ev1[i].time == ev2[i].time && ev1[i].kind == ev2[i].kind &&
                  ev1[i].cascade_id == ev2[i].cascade_id;
    DetectorModel det;
    det.jitter_sigma = 20.0;
    det.dark_rate = {1e-5, 1e-5, 1e-5, 1e-5};
    const auto ch = assign_polarizations(ev1, kParams, Basis::Rectilinear,
                                         FrameMode::RotatingBasis, 118);
    const auto tg1 = detect(ev1, ch, det, dur, 119);
    const auto tg2 = detect(ev1, ch, det, dur, 119);
    identical = identical && tg1.size() == tg2.size();
    for (size_t i = 0; identical && i < tg1.size(); ++i)
      identical = tg1[i].timestamp == tg2[i].timestamp &&
                  tg1[i].channel == tg2[i].channel;
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() /
        ("qdc_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    TagStreamMeta meta;
    meta.sync_period = kT;
    meta.setting = "rerun";
    write_timetags((dir / "a.bin").string(), tg1, meta);
    write_timetags((dir / "b.bin").string(), tg1, meta);
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const bool files_equal = slurp(dir / "a.bin") == slurp(dir / "b.bin");
    fs::remove_all(dir);

    o.pass = cons <= 1e-9 && worst_rk4 <= 1e-6 && residual <= 1e-10 &&
             identical && files_equal;
    o.detail = fmt(
        "conservation %.1e (<= 1e-9); worst vs RK4 %.2e over 100 random "
        "drives (<= 1e-6); periodic residual %.1e (<= 1e-10); rerun "
        "identical=%s, files identical=%s",
        cons, worst_rk4, residual, identical ? "yes" : "no",
        files_equal ? "yes" : "no");
    return o;
  });

  run_check(12, "driven-vs-dc entangled yield ratio matches theory", [] {
    const auto& ar = driven_stream();
    const auto& dc = constant_stream();
    const auto cmp = cumulative_pairs(ar.maps, dc.maps);
    const CycleModel am(kParams, ar.wave);
    const CycleModel dm(kParams, dc.wave);
    const double analytic =
        am.entangled_pairs_per_cycle(PairAttribution::SameCycleOnly) /
        dm.entangled_pairs_per_cycle(PairAttribution::SameCycleOnly);
    Outcome o;
    const double dev = (cmp.ratio - analytic) / cmp.ratio_stderr;
    o.pass = std::isfinite(dev) && std::abs(dev) <= 3.0;
    o.detail = fmt(
        "measured ratio %.4f +- %.4f vs analytic %.4f (%+.2f sigma, 3 sigma "
        "gate)",
        cmp.ratio, cmp.ratio_stderr, analytic, dev);
    return o;
  });

  if (g_failures == 0)
    std::printf("acceptance: all 12 checks passed\n");
  else
    std::printf("acceptance: %d check(s) FAILED\n", g_failures);
  return g_failures;
}
