#include "qdcascade/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Demodulation factors below this magnitude leave the visibility estimate
// unconstrained; such bins are undefined under StaticBasis.
constexpr double kMinDemod = 0.15;

std::vector<double> _select_sorted(const std::vector<TimeTag>& tags,
                                   const std::vector<uint8_t>& channels) {
  std::vector<double> ts;
  ts.reserve(tags.size());
  for (const TimeTag& t : tags)
    if (std::find(channels.begin(), channels.end(), t.channel) !=
        channels.end())
      ts.push_back(static_cast<double>(t.timestamp));
  std::sort(ts.begin(), ts.end());
  return ts;
}

struct TaggedTime {
  double t;
  uint8_t channel;
};

std::vector<TaggedTime> _select_sorted_tagged(
    const std::vector<TimeTag>& tags, const std::vector<uint8_t>& channels) {
  std::vector<TaggedTime> ts;
  ts.reserve(tags.size());
  for (const TimeTag& t : tags)
    if (std::find(channels.begin(), channels.end(), t.channel) !=
        channels.end())
      ts.push_back(TaggedTime{static_cast<double>(t.timestamp), t.channel});
  std::sort(ts.begin(), ts.end(), [](const TaggedTime& l, const TaggedTime& r) {
    return l.t != r.t ? l.t < r.t : l.channel < r.channel;
  });
  return ts;
}

void _check_binning(double period, double bin_width) {
  if (period <= 0) throw std::invalid_argument("analyzer: period must be > 0");
  if (bin_width <= 0 || bin_width > period)
    throw std::invalid_argument("analyzer: bin_width must lie in (0, period]");
}

CoincidenceMap _empty_map(double period, double bin_width, int span,
                          const std::string& setting) {
  CoincidenceMap map;
  map.bin_width = bin_width;
  map.period = period;
  map.n_bins = static_cast<int>(std::ceil(period / bin_width));
  map.span = span;
  map.setting = setting;
  map.counts.assign(2 * span + 1,
                    std::vector<uint64_t>(
                        static_cast<size_t>(map.n_bins) * map.n_bins, 0));
  return map;
}

// Pair every first-group tag with every second-group tag within
// +-(span + 1) periods, calling sink(ch1, ch2, offset, bin1, bin2).
template <typename Sink>
void _pair_tags(const std::vector<TaggedTime>& first,
                const std::vector<TaggedTime>& second, double period,
                double bin_width, int n_bins, int span, Sink&& sink) {
  const double window = (span + 1) * period;
  size_t lo = 0;
  for (const TaggedTime& a : first) {
    const int64_t cyc_a = static_cast<int64_t>(std::floor(a.t / period));
    const int bin_a = std::min(
        static_cast<int>((a.t - cyc_a * period) / bin_width), n_bins - 1);
    while (lo < second.size() && second[lo].t < a.t - window) ++lo;
    for (size_t j = lo; j < second.size() && second[j].t <= a.t + window;
         ++j) {
      const TaggedTime& b = second[j];
      const int64_t cyc_b = static_cast<int64_t>(std::floor(b.t / period));
      const int64_t dn = cyc_b - cyc_a;
      if (dn < -span || dn > span) continue;
      const int bin_b = std::min(
          static_cast<int>((b.t - cyc_b * period) / bin_width), n_bins - 1);
      sink(a.channel, b.channel, static_cast<int>(dn), bin_a, bin_b);
    }
  }
}

uint64_t _n_sync(const std::vector<TaggedTime>& first,
                 const std::vector<TaggedTime>& second, double period) {
  double t_max = 0;
  if (!first.empty()) t_max = std::max(t_max, first.back().t);
  if (!second.empty()) t_max = std::max(t_max, second.back().t);
  return static_cast<uint64_t>(std::floor(t_max / period)) + 1;
}

double _var_contrast(double co, double cross) {
  const double n = co + cross;
  if (n <= 0) return kNaN;
  return 4.0 * co * cross / (n * n * n);
}

}  // namespace

// ---------------------------------------------------------------------------
// g2 autocorrelation

G2Histogram g2_auto(const std::vector<TimeTag>& tags,
                    const std::vector<uint8_t>& channels, double period,
                    double bin_width, int norm_lo, int norm_hi) {
  _check_binning(period, bin_width);
  if (norm_lo < 1 || norm_hi < norm_lo)
    throw std::invalid_argument("g2_auto: need 1 <= norm_lo <= norm_hi");

  const std::vector<double> ts = _select_sorted(tags, channels);
  const double window = (norm_hi + 0.5) * period;
  const int m_max = static_cast<int>(std::floor(window / bin_width));
  // Collect pairs out to the edge of the outermost bin, not to `window`
  // itself, so the edge bins are filled over their full width.
  const double collect = (m_max + 0.5) * bin_width;
  const size_t n_hist = 2 * m_max + 1;
  std::vector<uint64_t> hist(n_hist, 0);

  // Each ordered pair enters once at +tau and once at -tau.  The two entries
  // are binned independently (bin m covers [m*w - w/2, m*w + w/2)), so the
  // bins partition the lag axis exactly; with integer timestamps a shared
  // mirrored index would starve the center bin of one lattice lag.
  for (size_t i = 0; i < ts.size(); ++i) {
    for (size_t j = i + 1; j < ts.size() && ts[j] - ts[i] <= collect; ++j) {
      const double tau = ts[j] - ts[i];
      const int mp = static_cast<int>(std::floor(tau / bin_width + 0.5));
      if (mp <= m_max) ++hist[m_max + mp];
      const int mn = static_cast<int>(std::floor(-tau / bin_width + 0.5));
      if (-mn <= m_max) ++hist[m_max + mn];
    }
  }

  // Integrated peaks: peak n covers tau in [nT - T/2, nT + T/2).
  const auto peak_sum = [&](int n) {
    const double lo = n * period - 0.5 * period;
    const double hi = n * period + 0.5 * period;
    uint64_t s = 0;
    for (size_t b = 0; b < n_hist; ++b) {
      const double center = (static_cast<int>(b) - m_max) * bin_width;
      if (center >= lo && center < hi) s += hist[b];
    }
    return s;
  };

  double far_mean = 0;
  int n_far = 0;
  for (int n = norm_lo; n <= norm_hi; ++n) {
    far_mean += static_cast<double>(peak_sum(n)) +
                static_cast<double>(peak_sum(-n));
    n_far += 2;
  }
  if (n_far > 0) far_mean /= n_far;

  G2Histogram g;
  g.bin_width = bin_width;
  g.period = period;
  g.norm_lo = norm_lo;
  g.norm_hi = norm_hi;
  g.tau.resize(n_hist);
  g.g2.resize(n_hist);
  const double bins_per_period = period / bin_width;
  for (size_t b = 0; b < n_hist; ++b) {
    g.tau[b] = (static_cast<int>(b) - m_max) * bin_width;
    g.g2[b] = far_mean > 0 ? hist[b] * bins_per_period / far_mean : kNaN;
  }
  const uint64_t center = peak_sum(0);
  g.center_integrated = far_mean > 0 ? center / far_mean : kNaN;
  // The center window holds both orders of each pair: variance 2 * counts.
  g.center_stderr =
      far_mean > 0 ? std::sqrt(2.0 * static_cast<double>(center)) / far_mean
                   : kNaN;
  return g;
}

// ---------------------------------------------------------------------------
// 2D coincidence maps

uint64_t CoincidenceMap::offset_total(int offset) const {
  uint64_t s = 0;
  for (uint64_t c : counts[offset + span]) s += c;
  return s;
}

bool CoincidenceMap::compatible(const CoincidenceMap& other) const {
  return bin_width == other.bin_width && period == other.period &&
         n_bins == other.n_bins && span == other.span;
}

CoincidenceMap coincidence_map(const std::vector<TimeTag>& tags,
                               const std::vector<uint8_t>& first_channels,
                               const std::vector<uint8_t>& second_channels,
                               double period, double bin_width, int span,
                               const std::string& setting) {
  _check_binning(period, bin_width);
  if (span < 0) throw std::invalid_argument("coincidence_map: span must be >= 0");
  CoincidenceMap map = _empty_map(period, bin_width, span, setting);
  const auto first = _select_sorted_tagged(tags, first_channels);
  const auto second = _select_sorted_tagged(tags, second_channels);
  map.n_first = first.size();
  map.n_second = second.size();
  map.n_sync = _n_sync(first, second, period);
  _pair_tags(first, second, period, bin_width, map.n_bins, span,
             [&](uint8_t, uint8_t, int dn, int i, int j) {
               ++map.counts[dn + span][static_cast<size_t>(i) * map.n_bins + j];
             });
  return map;
}

CoincidenceMap coincidence_map_unpolarized(const std::vector<TimeTag>& tags,
                                           double period, double bin_width,
                                           int span) {
  return coincidence_map(tags, {0, 1}, {2, 3}, period, bin_width, span,
                         "unpolarized");
}

PolarizedMaps polarized_maps(const std::vector<TimeTag>& tags, double period,
                             double bin_width, int span,
                             const std::string& basis_label) {
  _check_binning(period, bin_width);
  if (span < 0) throw std::invalid_argument("polarized_maps: span must be >= 0");
  PolarizedMaps pm;
  pm.basis_label = basis_label;
  pm.co = _empty_map(period, bin_width, span, basis_label + "/co");
  pm.cross = _empty_map(period, bin_width, span, basis_label + "/cross");
  const auto first = _select_sorted_tagged(tags, {0, 1});
  const auto second = _select_sorted_tagged(tags, {2, 3});
  for (CoincidenceMap* m : {&pm.co, &pm.cross}) {
    m->n_first = first.size();
    m->n_second = second.size();
    m->n_sync = _n_sync(first, second, period);
  }
  _pair_tags(first, second, period, bin_width, pm.co.n_bins, span,
             [&](uint8_t ch1, uint8_t ch2, int dn, int i, int j) {
               // co: (0,2) and (1,3); cross: (0,3) and (1,2).
               const bool co = (ch1 == 0 && ch2 == 2) || (ch1 == 1 && ch2 == 3);
               CoincidenceMap& m = co ? pm.co : pm.cross;
               ++m.counts[dn + span][static_cast<size_t>(i) * m.n_bins + j];
             });
  return pm;
}

Grid2D accidental_floor(const CoincidenceMap& map, int norm_lo, int norm_hi) {
  if (norm_lo < 1 || norm_hi < norm_lo)
    throw std::invalid_argument("accidental_floor: need 1 <= norm_lo <= norm_hi");
  if (map.span < norm_lo)
    throw std::invalid_argument(
        "accidental_floor: map span smaller than the normalization window");
  norm_hi = std::min(norm_hi, map.span);
  Grid2D grid;
  grid.n_bins = map.n_bins;
  grid.v.assign(static_cast<size_t>(map.n_bins) * map.n_bins, 0.0);
  int n_used = 0;
  for (int n = norm_lo; n <= norm_hi; ++n) {
    for (int sgn : {+1, -1}) {
      const int off = sgn * n;
      if (map.n_sync <= static_cast<uint64_t>(n)) continue;
      // Offset n can only occur in n_sync - |n| cycle pairs.
      const double corr =
          static_cast<double>(map.n_sync) / (map.n_sync - n);
      const auto& cnt = map.counts[off + map.span];
      for (size_t idx = 0; idx < grid.v.size(); ++idx)
        grid.v[idx] += corr * cnt[idx];
      ++n_used;
    }
  }
  if (n_used == 0)
    throw std::invalid_argument("accidental_floor: no usable far offsets");
  for (double& v : grid.v) v /= n_used;
  return grid;
}

Grid2D g2_cross_2d(const CoincidenceMap& map, int norm_lo, int norm_hi) {
  const Grid2D floor = accidental_floor(map, norm_lo, norm_hi);
  Grid2D g;
  g.n_bins = map.n_bins;
  g.v.assign(floor.v.size(), kNaN);
  const auto& same = map.counts[map.span];
  for (size_t idx = 0; idx < g.v.size(); ++idx)
    if (floor.v[idx] > 0) g.v[idx] = same[idx] / floor.v[idx];
  return g;
}

// ---------------------------------------------------------------------------
// Fidelity

double contrast(double co, double cross) {
  const double n = co + cross;
  if (n <= 0) return kNaN;
  return (co - cross) / n;
}

namespace {

struct BinCounts {
  double co = 0, cross = 0;
  double total() const { return co + cross; }
};

// Visibility estimate from one basis with a known per-bin demodulation
// factor: model (co - cross) = V * c * (co + cross).  `sign` is +1 for the
// diagonal basis and -1 for circular (whose contrast is -V cos(phi)).
struct VisibilityAccumulator {
  double num = 0, den = 0;

  void add(const BinCounts& b, double c, double sign) {
    num += sign * (b.co - b.cross) * c;
    den += b.total() * c * c;
  }
  bool defined() const { return den > 0; }
  double value() const { return num / den; }
  double variance() const { return 1.0 / den; }  // Var(co - cross) = co + cross
};

}  // namespace

FidelityMapResult fidelity_map(const PolarizedMaps& rect,
                               const PolarizedMaps& diag,
                               const PolarizedMaps& circ, int offset,
                               const FidelitySettings& s) {
  const CoincidenceMap& ref = rect.co;
  for (const PolarizedMaps* pm : {&rect, &diag, &circ}) {
    if (!pm->co.compatible(ref) || !pm->cross.compatible(ref))
      throw std::invalid_argument("fidelity_map: incompatible maps");
  }
  if (offset < -ref.span || offset > ref.span)
    throw std::invalid_argument("fidelity_map: offset outside map span");

  FidelityMapResult r;
  r.bin_width = ref.bin_width;
  r.period = ref.period;
  r.n_bins = ref.n_bins;
  r.offset = offset;
  const size_t n2 = static_cast<size_t>(ref.n_bins) * ref.n_bins;
  r.f.assign(n2, kNaN);
  r.stderr_.assign(n2, kNaN);

  for (int i = 0; i < ref.n_bins; ++i) {
    for (int j = 0; j < ref.n_bins; ++j) {
      const size_t idx = static_cast<size_t>(i) * ref.n_bins + j;
      const BinCounts br{
          static_cast<double>(rect.co.at(offset, i, j)),
          static_cast<double>(rect.cross.at(offset, i, j))};
      const BinCounts bd{
          static_cast<double>(diag.co.at(offset, i, j)),
          static_cast<double>(diag.cross.at(offset, i, j))};
      const BinCounts bc{
          static_cast<double>(circ.co.at(offset, i, j)),
          static_cast<double>(circ.cross.at(offset, i, j))};
      const double min_n = static_cast<double>(s.min_counts);
      if (br.total() < min_n || bd.total() < min_n || bc.total() < min_n)
        continue;
      const double tau = (j - i) * ref.bin_width + offset * ref.period;
      const double c = s.mode == FrameMode::StaticBasis
                           ? std::cos(s.fss_omega * tau)
                           : 1.0;
      if (s.mode == FrameMode::StaticBasis && std::abs(c) < kMinDemod)
        continue;
      VisibilityAccumulator vd, vc;
      vd.add(bd, c, +1.0);
      vc.add(bc, c, -1.0);
      const double c_r = contrast(br.co, br.cross);
      r.f[idx] = 0.25 * (1.0 + c_r + vd.value() + vc.value());
      r.stderr_[idx] = 0.25 * std::sqrt(_var_contrast(br.co, br.cross) +
                                        vd.variance() + vc.variance());
    }
  }
  return r;
}

namespace {

ValueWithError _fidelity_from_delay_bins(
    const std::vector<BinCounts>& br, const std::vector<BinCounts>& bd,
    const std::vector<BinCounts>& bc, const std::vector<double>& demod,
    const FidelitySettings& s) {
  BinCounts rect_total;
  VisibilityAccumulator vd, vc;
  for (size_t d = 0; d < br.size(); ++d) {
    rect_total.co += br[d].co;
    rect_total.cross += br[d].cross;
    if (s.mode == FrameMode::StaticBasis && std::abs(demod[d]) < kMinDemod)
      continue;
    vd.add(bd[d], demod[d], +1.0);
    vc.add(bc[d], demod[d], -1.0);
  }
  ValueWithError out;
  const double min_n = static_cast<double>(s.min_counts);
  if (rect_total.total() < min_n || !vd.defined() || !vc.defined() ||
      vd.den < min_n * kMinDemod * kMinDemod ||
      vc.den < min_n * kMinDemod * kMinDemod)
    return out;
  out.value = 0.25 * (1.0 + contrast(rect_total.co, rect_total.cross) +
                      vd.value() + vc.value());
  out.stderr_ =
      0.25 * std::sqrt(_var_contrast(rect_total.co, rect_total.cross) +
                       vd.variance() + vc.variance());
  out.defined = true;
  return out;
}

// Counts of one cycle-offset square projected onto the delay axis
// d = j - i + (n_bins - 1).
std::vector<BinCounts> _delay_projection(const CoincidenceMap& co,
                                         const CoincidenceMap& cross,
                                         int offset) {
  const int n = co.n_bins;
  std::vector<BinCounts> out(2 * n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t d = static_cast<size_t>(j - i + n - 1);
      out[d].co += static_cast<double>(co.at(offset, i, j));
      out[d].cross += static_cast<double>(cross.at(offset, i, j));
    }
  return out;
}

}  // namespace

ValueWithError cycle_fidelity(const PolarizedMaps& rect,
                              const PolarizedMaps& diag,
                              const PolarizedMaps& circ, int offset,
                              const FidelitySettings& s) {
  const int n = rect.co.n_bins;
  const auto br = _delay_projection(rect.co, rect.cross, offset);
  const auto bd = _delay_projection(diag.co, diag.cross, offset);
  const auto bc = _delay_projection(circ.co, circ.cross, offset);
  std::vector<double> demod(br.size(), 1.0);
  if (s.mode == FrameMode::StaticBasis) {
    for (size_t d = 0; d < demod.size(); ++d) {
      const double tau = (static_cast<int>(d) - (n - 1)) * rect.co.bin_width +
                         offset * rect.co.period;
      demod[d] = std::cos(s.fss_omega * tau);
    }
  }
  return _fidelity_from_delay_bins(br, bd, bc, demod, s);
}

DelayFidelity fidelity_vs_delay(const PolarizedMaps& rect,
                                const PolarizedMaps& diag,
                                const PolarizedMaps& circ,
                                const FidelitySettings& s) {
  const int n = rect.co.n_bins;
  const auto br = _delay_projection(rect.co, rect.cross, 0);
  const auto bd = _delay_projection(diag.co, diag.cross, 0);
  const auto bc = _delay_projection(circ.co, circ.cross, 0);

  DelayFidelity out;
  out.bin_width = rect.co.bin_width;
  out.tau.resize(br.size());
  out.f.assign(br.size(), kNaN);
  out.stderr_.assign(br.size(), kNaN);
  out.weight.assign(br.size(), 0);
  for (size_t d = 0; d < br.size(); ++d) {
    const double tau = (static_cast<int>(d) - (n - 1)) * rect.co.bin_width;
    out.tau[d] = tau;
    out.weight[d] = static_cast<uint64_t>(br[d].total() + bd[d].total() +
                                          bc[d].total());
    const double c = s.mode == FrameMode::StaticBasis
                         ? std::cos(s.fss_omega * tau)
                         : 1.0;
    const std::vector<BinCounts> r1{br[d]}, d1{bd[d]}, c1{bc[d]};
    const std::vector<double> dm{c};
    const ValueWithError fe = _fidelity_from_delay_bins(r1, d1, c1, dm, s);
    if (fe.defined) {
      out.f[d] = fe.value;
      out.stderr_[d] = fe.stderr_;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair yield

CumulativeCurve cumulative_excess(const PolarizedMaps& rect) {
  const CoincidenceMap& co = rect.co;
  const CoincidenceMap& cross = rect.cross;
  if (!co.compatible(cross))
    throw std::invalid_argument("cumulative_excess: incompatible maps");
  const int n = co.n_bins;

  CumulativeCurve out;
  out.t.resize(n);
  out.excess.resize(n);
  double running = 0;
  for (int j = 0; j < n; ++j) {
    double col = 0;
    for (int i = 0; i < n; ++i) {
      col += static_cast<double>(co.at(0, i, j)) -
             static_cast<double>(cross.at(0, i, j));
    }
    running += col;
    out.t[j] = std::min((j + 1) * co.bin_width, co.period);
    out.excess[j] = running;
  }
  out.total_excess = running;

  uint64_t same = 0, all = 0;
  double var = 0;
  for (int off = -co.span; off <= co.span; ++off) {
    const uint64_t tot = co.offset_total(off) + cross.offset_total(off);
    all += tot;
    if (off == 0) same = tot;
  }
  var = static_cast<double>(same);  // Var(co - cross) = co + cross
  out.total_excess_var = var;
  out.total_coincidences = all;
  out.same_cycle_coincidences = same;
  out.per_total.resize(n);
  out.per_same_cycle.resize(n);
  for (int j = 0; j < n; ++j) {
    out.per_total[j] = all > 0 ? out.excess[j] / all : kNaN;
    out.per_same_cycle[j] = same > 0 ? out.excess[j] / same : kNaN;
  }
  return out;
}

PairYieldComparison cumulative_pairs(const PolarizedMaps& driven_rect,
                                     const PolarizedMaps& reference_rect) {
  PairYieldComparison cmp;
  cmp.driven = cumulative_excess(driven_rect);
  cmp.reference = cumulative_excess(reference_rect);
  if (cmp.reference.total_excess != 0) {
    cmp.ratio = cmp.driven.total_excess / cmp.reference.total_excess;
    const double rel2 =
        cmp.driven.total_excess_var /
            (cmp.driven.total_excess * cmp.driven.total_excess) +
        cmp.reference.total_excess_var /
            (cmp.reference.total_excess * cmp.reference.total_excess);
    cmp.ratio_stderr = std::abs(cmp.ratio) * std::sqrt(rel2);
  } else {
    cmp.ratio = kNaN;
    cmp.ratio_stderr = kNaN;
  }
  return cmp;
}

// ---------------------------------------------------------------------------
// QBER

QberResult qber_from_fidelity(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0))
    throw std::invalid_argument("qber_from_fidelity: fidelity must lie in [0, 1]");
  QberResult r;
  r.qber = 2.0 * (1.0 - fidelity) / 3.0;
  r.secure = r.qber < kQberSecureThreshold;
  return r;
}

}  // namespace qdc
