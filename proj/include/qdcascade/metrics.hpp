#pragma once
// Analytic photon-pair metrics in the periodic steady state: cascade pair
// densities, pairs per cycle, pair rates, and the model fidelity map.
// Pair rates are returned in pairs/ns; all other rates stay 1/ps.

#include <memory>
#include <vector>

#include "qdcascade/dynamics.hpp"
#include "qdcascade/model.hpp"

namespace qdc {

// Fidelity of a cascade pair to the maximally entangled target at pair delay
// tau: 0.25 + (f0 - 0.25) * exp(-tau / t_coh).
double intrinsic_fidelity(const DeviceParams& params, double tau);

// Werner-state visibility V(tau) = (4 f - 1) / 3 of the same pair.
double pair_visibility(const DeviceParams& params, double tau);

// Closed-form DC pair rate R(p) = p^2 a b / [(b+p)(ab + ap + p^2)], in
// pairs/ns.  Tunneling, if configured, is treated as an additional loss in
// the numeric route, not here; this is the canonical tunnel-free form.
double dc_pair_rate(const DeviceParams& params, double pump);

// Fraction of all emitted photons that belong to completed cascades under DC
// driving: 2 R / (a P_XX + b P_X) = 2 p b / (p + b)^2.
double cascade_photon_fraction(const DeviceParams& params, double pump);

// Whether a cascade whose X photon outlives the cycle of its XX photon is
// attributed to the XX photon's cycle (default) or dropped.
enum class PairAttribution { ByFirstPhoton, SameCycleOnly };

// Cached periodic solution of one (params, waveform) pair: boundary states of
// the periodic steady state plus per-segment propagators.  All times are
// positions within [0, period) unless stated otherwise.
class CycleModel {
 public:
  CycleModel(const DeviceParams& params, const DriveWaveform& w);

  const DeviceParams& params() const { return params_; }
  const DriveWaveform& waveform() const { return waveform_; }

  // Periodic-steady-state populations at in-cycle time t.
  Populations at(double t) const;

  double xx_emission_rate(double t) const;  // a * P_XX(t)  [1/ps]
  double x_emission_rate(double t) const;   // b * P_X(t)   [1/ps]

  // Survival of an exciton created at t1 against radiative decay, re-pumping
  // and tunneling until t2 >= t1 (absolute times; waveform continues
  // periodically): exp(-Integral_t1^t2 (b + tunnel + p(s)) ds).
  double survival(double t1, double t2) const;

  // Probability that an exciton created at t1 decays radiatively in
  // (t1, t_max) with an extra exponential weight exp(-extra_rate * (t2-t1))
  // applied to the emission density.  t_max may be +infinity; the integral is
  // truncated once survival < 1e-12.
  double daughter_yield(double t1, double t_max, double extra_rate = 0.0) const;

  // Joint cascade pair density at absolute times t2 >= t1 >= 0:
  // a P_XX(t1) * survival(t1, t2) * b   [1/ps^2].
  double pair_density(double t1, double t2) const;

  double pairs_per_cycle(PairAttribution attribution) const;

  // Expected co-minus-cross coincidence excess per cycle in the rectilinear
  // basis, i.e. the visibility-weighted pair count Integral a P_XX V(tau) ...;
  // the analytic counterpart of a measured entangled-pair excess.
  double entangled_pairs_per_cycle(PairAttribution attribution) const;

 private:
  DeviceParams params_;
  DriveWaveform waveform_;
  CycleSegments segs_;
  std::vector<Propagator> props_;      // one per segment
  std::vector<Populations> bound_states_;  // state at each segment bound
  int segment_of(double u) const;      // u in [0, period)
};

double cascade_pair_density(const DeviceParams& params, const DriveWaveform& w,
                            double t1, double t2);

double pairs_per_cycle(const DeviceParams& params, const DriveWaveform& w,
                       PairAttribution attribution =
                           PairAttribution::ByFirstPhoton);

// pairs_per_cycle / period, unit-converted to pairs/ns.
double pair_rate(const DeviceParams& params, const DriveWaveform& w);

// Model prediction for the measured two-photon fidelity on a (t1, t2) grid:
// f = [f_int(tau) D_casc + 0.25 D_acc] / (D_casc + D_acc) with the
// accidental density D_acc = max(0, r_XX(t1) r_X(t2) - D_casc) taken from the
// factorized singles product.  Grid cells where both densities vanish carry
// NaN ("undefined") in f.
struct FidelityGrid {
  double bin = 0;      // [ps]
  double period = 0;   // t1 spans [0, period)
  double horizon = 0;  // t2 spans [0, horizon)
  int n1 = 0, n2 = 0;
  std::vector<double> f;       // n1 * n2, row-major in t1; NaN = undefined
  std::vector<double> weight;  // D_casc + D_acc per cell [1/ps^2]

  double at(int i, int j) const { return f[static_cast<size_t>(i) * n2 + j]; }
};
FidelityGrid model_fidelity_map(const DeviceParams& params,
                                const DriveWaveform& w, double bin,
                                double horizon);

}  // namespace qdc
