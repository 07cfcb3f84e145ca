#pragma once
// Kinetic Monte Carlo photon streams: exact-jump trajectories of the driven
// three-level system, Werner-state polarization outcomes, and a detector
// model producing integer-ps time tags.

#include <array>
#include <cstdint>
#include <vector>

#include "qdcascade/model.hpp"

namespace qdc {

enum class PhotonKind : uint8_t { Biexciton = 0, Exciton = 1 };

struct EmissionEvent {
  double time = 0;               // [ps]
  PhotonKind kind = PhotonKind::Biexciton;
  int64_t cascade_id = -1;       // shared by a completed XX/X pair; -1 otherwise
  uint64_t cycle_index = 0;      // floor(time / period)
};

// Exact stochastic jump simulation over [0, duration).  Pump jumps G->X and
// X->XX, radiative decays XX->X and X->G (the photons), tunneling XX->X and
// X->G.  Exponential waiting times are truncated and resampled at every pump
// edge.  A cascade id links an XX photon to its daughter X photon only when
// no pump or tunnel jump intervened.  Identical inputs give identical output.
std::vector<EmissionEvent> simulate_emissions(const DeviceParams& params,
                                              const DriveWaveform& w,
                                              double duration, uint64_t seed,
                                              Level initial = Level::Ground);

enum class Basis : uint8_t { Rectilinear = 0, Diagonal = 1, Circular = 2 };

// RotatingBasis: the second photon's diagonal/circular analyzers co-rotate
// with the fine-structure precession (phase cancels at acquisition).
// StaticBasis: fixed analyzers; correlations oscillate with fss_omega * tau
// and are demodulated post hoc by the analyzer.
enum class FrameMode : uint8_t { RotatingBasis = 0, StaticBasis = 1 };

// Detector channel convention, fixed across the toolkit:
// 0 = XX co-polarized, 1 = XX cross-polarized, 2 = X co, 3 = X cross.
inline constexpr int kChannels = 4;

// Draw a detector channel for every emission, measuring both photons in the
// given basis.  Linked pairs follow the Werner state
// rho = V |Phi(phi)><Phi(phi)| + (1 - V)/4 I with V = (4 f_int(tau) - 1)/3
// and phi = fss_omega * tau (StaticBasis) or 0 (RotatingBasis); unlinked
// photons are unpolarized.  Returns one channel per event, aligned by index.
std::vector<uint8_t> assign_polarizations(const std::vector<EmissionEvent>& events,
                                          const DeviceParams& params,
                                          Basis basis, FrameMode mode,
                                          uint64_t seed);

struct DetectorModel {
  std::array<double, 4> efficiency{1, 1, 1, 1};      // per channel
  double jitter_sigma = 0;                           // Gaussian [ps]
  std::array<double, 4> dark_rate{0, 0, 0, 0};       // Poisson [1/ps]

  void validate() const;
};

struct TimeTag {
  uint64_t timestamp = 0;  // [ps]
  uint8_t channel = 0;
};

// Apply efficiency, jitter and dark counts; tags sorted by (timestamp,
// channel).  Jittered events falling before t = 0 or at/after `duration` are
// dropped.
std::vector<TimeTag> detect(const std::vector<EmissionEvent>& events,
                            const std::vector<uint8_t>& channels,
                            const DetectorModel& det, double duration,
                            uint64_t seed);

}  // namespace qdc
