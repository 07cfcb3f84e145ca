#pragma once
// Three-level emitter (ground / exciton / biexciton) under piecewise-constant
// electrical driving: device parameters, drive waveforms, and the
// rate-equation generator.  Times in ps, rates in 1/ps throughout.

#include <array>
#include <vector>

namespace qdc {

// State index convention used across the library.
enum class Level : int { Ground = 0, Exciton = 1, Biexciton = 2 };

struct Populations {
  double g = 1.0;   // ground
  double x = 0.0;   // exciton
  double xx = 0.0;  // biexciton

  double sum() const { return g + x + xx; }
  double operator[](int i) const { return i == 0 ? g : (i == 1 ? x : xx); }
  double& operator[](int i) { return i == 0 ? g : (i == 1 ? x : xx); }

  // Throws std::invalid_argument unless entries are probabilities summing to 1
  // within `tol`.
  void validate(double tol = 1e-9) const;
};

struct DeviceParams {
  double tau_xx = 300.0;     // biexciton radiative lifetime [ps]
  double tau_x = 500.0;      // exciton radiative lifetime [ps]
  double tunnel_rate = 0.0;  // non-radiative escape XX->X and X->G [1/ps]
  double f0 = 1.0;           // entanglement fidelity at zero pair delay
  double t_coh = 2000.0;     // pair coherence time [ps] (illustrative default)
  double fss_omega = 0.0;    // fine-structure precession [rad/ps]

  double a() const { return 1.0 / tau_xx; }  // XX radiative rate
  double b() const { return 1.0 / tau_x; }   // X radiative rate

  void validate() const;
};

// Periodic rectangular pump pulse on top of a DC floor.  The pulse occupies
// [phase, phase + pulse_width) within each cycle, half-open edges, wrapping
// across the cycle boundary when phase + pulse_width > period.  A pure DC
// drive is pulse_rate = 0 with `period` kept as the analysis frame.
struct DriveWaveform {
  double dc_rate = 0.0;     // pump floor [1/ps]
  double pulse_rate = 0.0;  // extra pump while the pulse is on [1/ps]
  double pulse_width = 0.0; // [ps]
  double period = 0.0;      // [ps]
  double phase = 0.0;       // pulse start within the cycle [ps]

  void validate() const;

  static DriveWaveform dc(double rate, double analysis_period);
  static DriveWaveform pulsed(double period, double pulse_rate,
                              double pulse_width, double dc_floor = 0.0,
                              double phase = 0.0);
};

// Instantaneous pump rate at absolute time t (periodic continuation for all t).
double pump_rate_at(const DriveWaveform& w, double t);

// First pump discontinuity strictly after t.
double next_pump_boundary(const DriveWaveform& w, double t);

// One cycle [0, period) split into maximal segments of constant pump:
// segment i spans [bounds[i], bounds[i+1]) with rate pumps[i].
struct CycleSegments {
  std::vector<double> bounds;  // size pumps.size() + 1; first 0, last period
  std::vector<double> pumps;
};
CycleSegments cycle_segments(const DriveWaveform& w);

// Column-stochastic rate-equation generator dP/dt = M P over (G, X, XX) with
// pump driving G->X and X->XX at the given rate.  Columns sum to zero.
using RateMatrix = std::array<std::array<double, 3>, 3>;
RateMatrix generator(const DeviceParams& params, double pump);

}  // namespace qdc
