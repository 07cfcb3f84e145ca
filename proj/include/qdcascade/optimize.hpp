#pragma once
// Deterministic optimizers: best DC operating point, best reset clock rate,
// and the clock-frequency band beating the DC optimum.  Frequencies in GHz
// at this interface; pair rates in pairs/ns.

#include "qdcascade/metrics.hpp"
#include "qdcascade/model.hpp"

namespace qdc {

struct PumpOptimum {
  double pump = 0;  // [1/ps]
  double rate = 0;  // [pairs/ns]
};

// Maximize dc_pair_rate over pump: log-spaced bracketing scan (n_scan points
// over [p_lo, p_hi]) followed by golden-section refinement to 1e-6 relative
// tolerance in pump.
PumpOptimum optimal_dc_pump(const DeviceParams& params, double p_lo = 1e-5,
                            double p_hi = 1.0, int n_scan = 200);

struct ClockOptimum {
  double freq_ghz = 0;
  double rate = 0;             // [pairs/ns]
  double pairs_per_cycle = 0;  // at the optimum
};

// Maximize pair_rate over clock frequency for the given pulse shape
// (w_template.period is ignored and replaced per scan point).  Log-spaced
// scan of at least n_scan points over [f_lo, f_hi] GHz, golden-section
// refinement; throws std::runtime_error when no interior maximum exists in
// the scan range.
ClockOptimum optimal_clock_rate(const DeviceParams& params,
                                const DriveWaveform& w_template,
                                double f_lo_ghz = 0.1, double f_hi_ghz = 10.0,
                                int n_scan = 120);

struct BandResult {
  bool has_band = false;      // false: driven rate never beats the DC optimum
  double f_low_ghz = 0;       // edges of the superequilibrium band
  double f_high_ghz = 0;
  bool low_edge_clipped = false;   // edge lies at the scan bound, not a crossing
  bool high_edge_clipped = false;
  double f_optimal_ghz = 0;
  double rate_at_optimal = 0;       // [pairs/ns]
  double dc_equilibrium_rate = 0;   // best DC rate [pairs/ns]
  double dc_pump = 0;               // pump achieving it [1/ps]
  double enhancement = 0;           // rate_at_optimal / dc_equilibrium_rate - 1
  // Sensitivity report: the high edge depends strongly on the pulse model.
  // These are the closed-form edges for an idealized instantaneous full
  // reset (pairs/cycle = 1 - (a e^{-bT} - b e^{-aT})/(a - b)).
  double f_low_ideal_ghz = 0;
  double f_high_ideal_ghz = 0;
};

// Frequency band where the driven pair rate exceeds the best DC rate.  Edges
// bisected to 1e-4 GHz.  An empty band is a result, not an exception.
BandResult superequilibrium_band(const DeviceParams& params,
                                 const DriveWaveform& w_template,
                                 double f_lo_ghz = 0.1, double f_hi_ghz = 10.0,
                                 int n_scan = 120);

// Pairs per cycle of an idealized instantaneous full reset every T ps.
double ideal_reset_pairs_per_cycle(const DeviceParams& params, double period);

}  // namespace qdc
