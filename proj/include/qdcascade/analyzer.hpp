#pragma once
// Photon-correlation analysis on time-tag streams: start-stop-free g2
// histograms, two-dimensional coincidence maps synchronized to the drive
// clock, entanglement fidelity extraction, QBER.
//
// Normalization convention: the uncorrelated level is estimated from
// coincidences at large cycle separation (|n| in [norm_lo, norm_hi] cycles,
// default [5, 20]) and scaled to 1.

#include <cstdint>
#include <string>
#include <vector>

#include "qdcascade/montecarlo.hpp"

namespace qdc {

// ---------------------------------------------------------------------------
// g2 autocorrelation

struct G2Histogram {
  double bin_width = 0;   // [ps]
  double period = 0;      // [ps]
  int norm_lo = 5, norm_hi = 20;
  std::vector<double> tau;  // bin centers, symmetric around 0 [ps]
  std::vector<double> g2;   // normalized so far side peaks integrate to 1
  double center_integrated = 0;  // integrated center peak / mean far peak
  double center_stderr = 0;      // Poisson
};

// Full (start-stop-free) autocorrelation of the tags on `channels`: every
// ordered pair within +-(norm_hi + 0.5) periods enters the histogram.
G2Histogram g2_auto(const std::vector<TimeTag>& tags,
                    const std::vector<uint8_t>& channels, double period,
                    double bin_width, int norm_lo = 5, int norm_hi = 20);

// ---------------------------------------------------------------------------
// Clock-synchronized 2D coincidence maps

// Coincidence counts binned by in-cycle position of both photons, kept per
// cycle offset n = cycle(second) - cycle(first), n in [-span, span].  The
// same-cycle square is offset 0.
struct CoincidenceMap {
  double bin_width = 0;  // [ps]
  double period = 0;     // [ps]
  int n_bins = 0;        // ceil(period / bin_width)
  int span = 0;
  uint64_t n_sync = 0;   // drive cycles covered by the stream
  uint64_t n_first = 0, n_second = 0;  // singles entering the pairing
  std::string setting;   // provenance label, e.g. "rectilinear/co"
  // counts[n + span][i * n_bins + j]; i = first-photon bin, j = second.
  std::vector<std::vector<uint64_t>> counts;

  uint64_t at(int offset, int i, int j) const {
    return counts[offset + span][static_cast<size_t>(i) * n_bins + j];
  }
  uint64_t offset_total(int offset) const;
  bool compatible(const CoincidenceMap& other) const;
};

// Pair every tag on first_channels with every tag on second_channels within
// +-(span + 1) periods and bin by cycle offset and in-cycle positions.
CoincidenceMap coincidence_map(const std::vector<TimeTag>& tags,
                               const std::vector<uint8_t>& first_channels,
                               const std::vector<uint8_t>& second_channels,
                               double period, double bin_width, int span,
                               const std::string& setting = "");

struct Grid2D {
  int n_bins = 0;
  std::vector<double> v;  // n_bins^2, NaN where undefined
  double at(int i, int j) const { return v[static_cast<size_t>(i) * n_bins + j]; }
};

// Mean coincidences per bin at large cycle separation, corrected for the
// finite stream length (offset n only has n_sync - |n| chances to occur).
Grid2D accidental_floor(const CoincidenceMap& map, int norm_lo = 5,
                        int norm_hi = 20);

// Normalized same-cycle g2 map: counts at offset 0 divided by the accidental
// floor; bins with an empty floor are NaN.
Grid2D g2_cross_2d(const CoincidenceMap& map, int norm_lo = 5,
                   int norm_hi = 20);

// All XX tags (channels 0, 1) against all X tags (channels 2, 3).
CoincidenceMap coincidence_map_unpolarized(const std::vector<TimeTag>& tags,
                                           double period, double bin_width,
                                           int span);

// Co-polarized map (channel pairs 0-2 and 1-3) and cross-polarized map
// (0-3 and 1-2) from one basis stream.
struct PolarizedMaps {
  CoincidenceMap co, cross;
  std::string basis_label;
};
PolarizedMaps polarized_maps(const std::vector<TimeTag>& tags, double period,
                             double bin_width, int span,
                             const std::string& basis_label = "");

// ---------------------------------------------------------------------------
// Fidelity extraction

// (co - cross) / (co + cross); NaN when co + cross = 0.
double contrast(double co, double cross);

// The six maps the fidelity formula consumes.
struct FidelitySettings {
  double fss_omega = 0;               // [rad/ps]
  FrameMode mode = FrameMode::RotatingBasis;
  uint64_t min_counts = 25;           // per basis, per bin (co + cross)
  int norm_lo = 5, norm_hi = 20;      // kept for provenance in outputs
};

struct FidelityMapResult {
  double bin_width = 0, period = 0;
  int n_bins = 0;
  int offset = 0;
  std::vector<double> f;        // NaN where undefined
  std::vector<double> stderr_;  // Poisson-propagated, NaN where undefined
  double at(int i, int j) const { return f[static_cast<size_t>(i) * n_bins + j]; }
};

// Per-bin two-photon fidelity f = (1 + C_rect + C_diag - C_circ) / 4 over the
// cycle-offset square, taking the diagonal/circular contrasts in the frame
// rotating at the fine-structure precession (demodulated per bin delay under
// StaticBasis).  Bins under min_counts in any basis are undefined.
FidelityMapResult fidelity_map(const PolarizedMaps& rect,
                               const PolarizedMaps& diag,
                               const PolarizedMaps& circ, int offset,
                               const FidelitySettings& s);

struct ValueWithError {
  double value = 0;
  double stderr_ = 0;
  bool defined = false;
};

// Fidelity integrated over one cycle-offset square (counts summed first, then
// contrasts; demodulated per delay bin under StaticBasis).
ValueWithError cycle_fidelity(const PolarizedMaps& rect,
                              const PolarizedMaps& diag,
                              const PolarizedMaps& circ, int offset,
                              const FidelitySettings& s);

struct DelayFidelity {
  double bin_width = 0;
  std::vector<double> tau;     // bin centers, (-period, period) [ps]
  std::vector<double> f;       // NaN under min_counts
  std::vector<double> stderr_;
  std::vector<uint64_t> weight;  // co + cross coincidences per delay bin (all bases)
};

// Coincidence-weighted projection of the same-cycle fidelity map onto the
// pair-delay axis.
DelayFidelity fidelity_vs_delay(const PolarizedMaps& rect,
                                const PolarizedMaps& diag,
                                const PolarizedMaps& circ,
                                const FidelitySettings& s);

// ---------------------------------------------------------------------------
// Pair yield

// Cumulative entangled-pair excess Sum(co - cross) of the rectilinear maps
// over the same-cycle square, accumulated along the second photon's in-cycle
// arrival time.  The rectilinear contrast carries no fine-structure phase, so
// the excess counts Werner pairs with no demodulation and the accidental
// background cancels in expectation.
struct CumulativeCurve {
  std::vector<double> t;            // bin right edges [ps]
  std::vector<double> excess;       // cumulative co - cross
  std::vector<double> per_total;    // / all coincidences at every offset
  std::vector<double> per_same_cycle;  // / same-cycle coincidences
  double total_excess = 0;
  double total_excess_var = 0;      // Poisson: Sum(co + cross)
  uint64_t total_coincidences = 0;  // all offsets, co + cross
  uint64_t same_cycle_coincidences = 0;
};
CumulativeCurve cumulative_excess(const PolarizedMaps& rect);

// Matched-run comparison: cumulative curves plus the end-of-cycle excess
// ratio (driven / reference) with its Poisson standard error.
struct PairYieldComparison {
  CumulativeCurve driven, reference;
  double ratio = 0;
  double ratio_stderr = 0;
};
PairYieldComparison cumulative_pairs(const PolarizedMaps& driven_rect,
                                     const PolarizedMaps& reference_rect);

// ---------------------------------------------------------------------------
// QBER

inline constexpr double kQberSecureThreshold = 0.276;

struct QberResult {
  double qber = 0;
  bool secure = false;  // qber < threshold
};

// BBM92 qubit error rate implied by a two-photon fidelity: 2 (1 - f) / 3.
QberResult qber_from_fidelity(double fidelity);

}  // namespace qdc
