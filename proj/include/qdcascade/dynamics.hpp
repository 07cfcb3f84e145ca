#pragma once
// Deterministic rate-equation dynamics: piecewise-exact propagation via the
// closed-form 3x3 matrix exponential, cycle evolution, and steady states.

#include <vector>

#include "qdcascade/model.hpp"

namespace qdc {

// Cached exponential of one constant-pump generator.  Uses the spectral
// (eigen) decomposition when the three eigenvalues are well separated and a
// scaling-and-squaring Pade approximant otherwise.
class Propagator {
 public:
  explicit Propagator(const RateMatrix& m);

  // exp(m * dt); dt >= 0.
  RateMatrix matrix(double dt) const;
  Populations apply(const Populations& p, double dt) const;

  bool spectral() const { return spectral_; }

 private:
  RateMatrix m_{};
  bool spectral_ = false;
  double lam1_ = 0, lam2_ = 0;       // nonzero eigenvalues (0 is always one)
  RateMatrix pr0_{}, pr1_{}, pr2_{}; // spectral projectors
};

// exp(m * dt) applied to p0.  Entries are clamped to [0,1] only within a
// 1e-9 numerical tolerance; larger violations are left visible.
Populations propagate(const RateMatrix& m, const Populations& p0, double dt);

struct Trajectory {
  std::vector<double> times;        // strictly increasing [ps]
  std::vector<Populations> states;  // same length as times
};

// Evolve p0 through n_cycles of the waveform starting at t = 0, sampling a
// uniform grid of samples_per_cycle points per cycle plus every pump edge.
Trajectory evolve_cycles(const DeviceParams& params, const DriveWaveform& w,
                         const Populations& p0, int n_cycles,
                         int samples_per_cycle);

// State at the cycle origin of the T-periodic steady state: the fixed point
// of the one-period propagator (eigenvector to eigenvalue 1, sum normalized),
// refined by power iteration if the direct solve is ill-conditioned.
// Residual ||Phi v - v||_inf < 1e-10 or throws std::runtime_error.
Populations periodic_steady_state(const DeviceParams& params,
                                  const DriveWaveform& w);

// Stationary state under constant pump; closed form for tunnel_rate = 0,
// direct null-space solve otherwise.  pump = 0 gives (1, 0, 0).
Populations dc_steady_state(const DeviceParams& params, double pump);

}  // namespace qdc
