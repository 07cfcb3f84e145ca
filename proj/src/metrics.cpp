#include "qdcascade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace qdc {

namespace {

constexpr double kSurvivalCutoff = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
struct GlRule {
  std::vector<double> x, w;
};

const GlRule& _gl32() {
  static const GlRule rule = [] {
    const int n = 32;
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double pp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1);
        }
        pp = n * (xi * p0 - p1) / (xi * xi - 1.0);
        const double dx = p0 / pp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.x[i] = -xi;
      r.x[n - 1 - i] = xi;
      r.w[i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
      r.w[n - 1 - i] = r.w[i];
    }
    return r;
  }();
  return rule;
}

}  // namespace

double intrinsic_fidelity(const DeviceParams& params, double tau) {
  params.validate();
  if (tau < 0)
    throw std::invalid_argument("intrinsic_fidelity: tau must be >= 0");
  return 0.25 + (params.f0 - 0.25) * std::exp(-tau / params.t_coh);
}

double pair_visibility(const DeviceParams& params, double tau) {
  return (4.0 * intrinsic_fidelity(params, tau) - 1.0) / 3.0;
}

double dc_pair_rate(const DeviceParams& params, double pump) {
  params.validate();
  if (pump < 0)
    throw std::invalid_argument("dc_pair_rate: pump must be >= 0");
  const double a = params.a();
  const double b = params.b();
  const double per_ps = pump * pump * a * b /
                        ((b + pump) * (a * b + a * pump + pump * pump));
  return per_ps * 1000.0;  // pairs/ns
}

double cascade_photon_fraction(const DeviceParams& params, double pump) {
  params.validate();
  if (pump < 0)
    throw std::invalid_argument("cascade_photon_fraction: pump must be >= 0");
  const double b = params.b();
  return 2.0 * pump * b / ((pump + b) * (pump + b));
}

CycleModel::CycleModel(const DeviceParams& params, const DriveWaveform& w)
    : params_(params), waveform_(w), segs_(cycle_segments(w)) {
  params_.validate();
  waveform_.validate();
  for (double p : segs_.pumps) props_.emplace_back(generator(params_, p));
  bound_states_.push_back(periodic_steady_state(params_, waveform_));
  for (size_t i = 0; i < props_.size(); ++i)
    bound_states_.push_back(props_[i].apply(
        bound_states_[i], segs_.bounds[i + 1] - segs_.bounds[i]));
}

int CycleModel::segment_of(double u) const {
  const auto it =
      std::upper_bound(segs_.bounds.begin(), segs_.bounds.end(), u);
  const int idx = static_cast<int>(it - segs_.bounds.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(segs_.pumps.size()) - 1);
}

Populations CycleModel::at(double t) const {
  if (t < 0) throw std::invalid_argument("CycleModel::at: t must be >= 0");
  double u = std::fmod(t, waveform_.period);
  const int seg = segment_of(u);
  return props_[seg].apply(bound_states_[seg], u - segs_.bounds[seg]);
}

double CycleModel::xx_emission_rate(double t) const {
  return params_.a() * at(t).xx;
}

double CycleModel::x_emission_rate(double t) const {
  return params_.b() * at(t).x;
}

double CycleModel::survival(double t1, double t2) const {
  if (t2 < t1)
    throw std::invalid_argument("survival: t2 must be >= t1");
  const double loss = params_.b() + params_.tunnel_rate;
  const int n_segs = static_cast<int>(segs_.pumps.size());
  // Walk whole segments with an explicit cursor; recomputing fmod per step
  // can stall just below a boundary and stop making progress.
  double u = std::fmod(t1, waveform_.period);
  int seg = segment_of(u);
  double remaining = t2 - t1;
  double exponent = 0;
  while (remaining > 0) {
    const double step = std::min(segs_.bounds[seg + 1] - u, remaining);
    exponent += (loss + segs_.pumps[seg]) * step;
    remaining -= step;
    ++seg;
    if (seg >= n_segs) seg = 0;
    u = segs_.bounds[seg];
  }
  return std::exp(-exponent);
}

double CycleModel::daughter_yield(double t1, double t_max,
                                  double extra_rate) const {
  const double b = params_.b();
  const double loss = b + params_.tunnel_rate;
  const int n_segs = static_cast<int>(segs_.pumps.size());
  double prefix = 1.0;  // exp(-Integral mu) accumulated so far
  double yield = 0;
  // Segment-cursor walk; see survival() for why fmod per step is unsafe.
  double u = std::fmod(t1, waveform_.period);
  int seg = segment_of(u);
  double remaining = t_max - t1;  // may be +infinity
  while (remaining > 0 && prefix >= kSurvivalCutoff) {
    const double step = std::min(segs_.bounds[seg + 1] - u, remaining);
    const double mu = loss + segs_.pumps[seg] + extra_rate;
    yield += prefix * (b / mu) * (1.0 - std::exp(-mu * step));
    prefix *= std::exp(-mu * step);
    remaining -= step;
    ++seg;
    if (seg >= n_segs) seg = 0;
    u = segs_.bounds[seg];
  }
  return yield;
}

double CycleModel::pair_density(double t1, double t2) const {
  if (t2 < t1) return 0.0;
  return params_.a() * at(t1).xx * survival(t1, t2) * params_.b();
}

namespace {

// Integral over one cycle of a * P_XX(t1) * yield(t1), by composite
// Gauss-Legendre panels short enough for the local exponential rates.
double _cycle_integral(const CycleModel& cm, const CycleSegments& segs,
                       const DeviceParams& params,
                       const std::function<double(double)>& yield) {
  const GlRule& gl = _gl32();
  const double a = params.a();
  double total = 0;
  for (size_t seg = 0; seg < segs.pumps.size(); ++seg) {
    const double s0 = segs.bounds[seg];
    const double s1 = segs.bounds[seg + 1];
    const double rate_scale = params.a() + params.b() +
                              2.0 * (segs.pumps[seg] + params.tunnel_rate);
    const int n_panels = std::max(
        1, static_cast<int>(std::ceil((s1 - s0) * rate_scale / 15.0)));
    const double h = (s1 - s0) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
      const double mid = s0 + (p + 0.5) * h;
      double acc = 0;
      for (size_t q = 0; q < gl.x.size(); ++q) {
        const double t1 = mid + 0.5 * h * gl.x[q];
        acc += gl.w[q] * a * cm.at(t1).xx * yield(t1);
      }
      total += acc * 0.5 * h;
    }
  }
  return total;
}

}  // namespace

double CycleModel::pairs_per_cycle(PairAttribution attribution) const {
  const double t_max = attribution == PairAttribution::SameCycleOnly
                           ? waveform_.period
                           : std::numeric_limits<double>::infinity();
  return _cycle_integral(*this, segs_, params_, [&](double t1) {
    return daughter_yield(t1, t_max);
  });
}

double CycleModel::entangled_pairs_per_cycle(PairAttribution attribution) const {
  const double t_max = attribution == PairAttribution::SameCycleOnly
                           ? waveform_.period
                           : std::numeric_limits<double>::infinity();
  const double v0 = (4.0 * params_.f0 - 1.0) / 3.0;
  const double extra = 1.0 / params_.t_coh;
  return v0 * _cycle_integral(*this, segs_, params_, [&](double t1) {
    return daughter_yield(t1, t_max, extra);
  });
}

double cascade_pair_density(const DeviceParams& params, const DriveWaveform& w,
                            double t1, double t2) {
  if (t1 < 0 || t2 < t1)
    throw std::invalid_argument(
        "cascade_pair_density: need 0 <= t1 <= t2");
  return CycleModel(params, w).pair_density(t1, t2);
}

double pairs_per_cycle(const DeviceParams& params, const DriveWaveform& w,
                       PairAttribution attribution) {
  return CycleModel(params, w).pairs_per_cycle(attribution);
}

double pair_rate(const DeviceParams& params, const DriveWaveform& w) {
  return pairs_per_cycle(params, w, PairAttribution::ByFirstPhoton) /
         w.period * 1000.0;
}

FidelityGrid model_fidelity_map(const DeviceParams& params,
                                const DriveWaveform& w, double bin,
                                double horizon) {
  if (bin <= 0)
    throw std::invalid_argument("model_fidelity_map: bin must be > 0");
  if (horizon <= 0)
    throw std::invalid_argument("model_fidelity_map: horizon must be > 0");
  const CycleModel cm(params, w);
  FidelityGrid grid;
  grid.bin = bin;
  grid.period = w.period;
  grid.horizon = horizon;
  grid.n1 = static_cast<int>(std::ceil(w.period / bin));
  grid.n2 = static_cast<int>(std::ceil(horizon / bin));
  grid.f.assign(static_cast<size_t>(grid.n1) * grid.n2, 0.0);
  grid.weight.assign(grid.f.size(), 0.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < grid.n1; ++i) {
    const double t1 = std::min((i + 0.5) * bin, w.period - 1e-9);
    const double r_xx = cm.xx_emission_rate(t1);
    for (int j = 0; j < grid.n2; ++j) {
      const double t2 = std::min((j + 0.5) * bin, horizon - 1e-9);
      const double tau = t2 - t1;
      const double d_casc = tau >= 0 ? cm.pair_density(t1, t2) : 0.0;
      const double d_acc =
          std::max(0.0, r_xx * cm.x_emission_rate(t2) - d_casc);
      const double denom = d_casc + d_acc;
      const size_t idx = static_cast<size_t>(i) * grid.n2 + j;
      grid.weight[idx] = denom;
      if (denom <= 0) {
        grid.f[idx] = nan;
      } else {
        const double f_int =
            tau >= 0 ? intrinsic_fidelity(params, tau) : 0.25;
        grid.f[idx] = (f_int * d_casc + 0.25 * d_acc) / denom;
      }
    }
  }
  return grid;
}

}  // namespace qdc
