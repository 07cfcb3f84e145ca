#include "qdcascade/optimize.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdc {

namespace {

// Golden-section maximizer inside [lo, hi]; deterministic, derivative-free.
double _golden_max(const std::function<double(double)>& f, double lo,
                   double hi, double reltol) {
  const double R = 0.6180339887498948482;
  const double C = 1.0 - R;
  double x1 = lo + C * (hi - lo);
  double x2 = lo + R * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > reltol * (std::abs(x1) + std::abs(x2)) + 1e-300) {
    if (f2 > f1) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + R * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = lo + C * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

std::vector<double> _log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return g;
}

double _bisect(const std::function<double(double)>& g, double a, double b,
               double tol) {
  double ga = g(a);
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

DriveWaveform _at_freq(const DriveWaveform& tmpl, double f_ghz) {
  DriveWaveform w = tmpl;
  w.period = 1000.0 / f_ghz;
  if (w.pulse_width > w.period)
    throw std::invalid_argument(
        "optimal_clock_rate: pulse_width exceeds the period at " +
        std::to_string(f_ghz) + " GHz; shrink the scan range or the pulse");
  if (w.phase >= w.period)
    throw std::invalid_argument(
        "optimal_clock_rate: phase exceeds the period at scan frequency");
  w.validate();
  return w;
}

}  // namespace

PumpOptimum optimal_dc_pump(const DeviceParams& params, double p_lo,
                            double p_hi, int n_scan) {
  params.validate();
  if (!(p_lo > 0 && p_hi > p_lo))
    throw std::invalid_argument("optimal_dc_pump: need 0 < p_lo < p_hi");
  if (n_scan < 3)
    throw std::invalid_argument("optimal_dc_pump: n_scan must be >= 3");
  const auto rate = [&](double p) { return dc_pair_rate(params, p); };
  const auto grid = _log_grid(p_lo, p_hi, n_scan);
  int best = 0;
  double best_rate = -1;
  for (int i = 0; i < n_scan; ++i) {
    const double r = rate(grid[i]);
    if (r > best_rate) {
      best_rate = r;
      best = i;
    }
  }
  const double lo = grid[std::max(0, best - 1)];
  const double hi = grid[std::min(n_scan - 1, best + 1)];
  const double p = _golden_max(rate, lo, hi, 1e-6);
  return PumpOptimum{p, rate(p)};
}

ClockOptimum optimal_clock_rate(const DeviceParams& params,
                                const DriveWaveform& w_template,
                                double f_lo_ghz, double f_hi_ghz, int n_scan) {
  params.validate();
  if (!(f_lo_ghz > 0 && f_hi_ghz > f_lo_ghz))
    throw std::invalid_argument("optimal_clock_rate: need 0 < f_lo < f_hi");
  n_scan = std::max(n_scan, 100);
  const auto rate = [&](double f) {
    return pair_rate(params, _at_freq(w_template, f));
  };
  const auto grid = _log_grid(f_lo_ghz, f_hi_ghz, n_scan);
  int best = 0;
  double best_rate = -1;
  std::vector<double> rates(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    rates[i] = rate(grid[i]);
    if (rates[i] > best_rate) {
      best_rate = rates[i];
      best = i;
    }
  }
  if (best == 0 || best == n_scan - 1)
    throw std::runtime_error(
        "optimal_clock_rate: no interior maximum in [" +
        std::to_string(f_lo_ghz) + ", " + std::to_string(f_hi_ghz) +
        "] GHz; rate at edges " + std::to_string(rates.front()) + " / " +
        std::to_string(rates.back()) + " pairs/ns");
  const double f = _golden_max(rate, grid[best - 1], grid[best + 1], 1e-7);
  ClockOptimum opt;
  opt.freq_ghz = f;
  opt.rate = rate(f);
  opt.pairs_per_cycle = pairs_per_cycle(params, _at_freq(w_template, f));
  return opt;
}

double ideal_reset_pairs_per_cycle(const DeviceParams& params, double period) {
  params.validate();
  if (period <= 0)
    throw std::invalid_argument(
        "ideal_reset_pairs_per_cycle: period must be > 0");
  const double a = params.a();
  const double b = params.b();
  if (std::abs(a - b) < 1e-12 * (a + b)) {
    // Degenerate lifetimes: hypoexponential collapses to an Erlang tail.
    return 1.0 - std::exp(-a * period) * (1.0 + a * period);
  }
  return 1.0 -
         (a * std::exp(-b * period) - b * std::exp(-a * period)) / (a - b);
}

BandResult superequilibrium_band(const DeviceParams& params,
                                 const DriveWaveform& w_template,
                                 double f_lo_ghz, double f_hi_ghz,
                                 int n_scan) {
  BandResult res;
  const PumpOptimum dc = optimal_dc_pump(params);
  ClockOptimum opt;
  try {
    opt = optimal_clock_rate(params, w_template, f_lo_ghz, f_hi_ghz, n_scan);
  } catch (const std::runtime_error&) {
    // No interior maximum (e.g. a pulse-free drive gives a flat rate curve):
    // fall back to the scan argmax so an empty band is still a result.
    n_scan = std::max(n_scan, 100);
    const auto grid = _log_grid(f_lo_ghz, f_hi_ghz, n_scan);
    opt.freq_ghz = grid[0];
    opt.rate = pair_rate(params, _at_freq(w_template, grid[0]));
    for (int i = 1; i < n_scan; ++i) {
      const double r = pair_rate(params, _at_freq(w_template, grid[i]));
      if (r > opt.rate) {
        opt.rate = r;
        opt.freq_ghz = grid[i];
      }
    }
    opt.pairs_per_cycle = opt.rate / 1000.0 * (1000.0 / opt.freq_ghz);
  }
  res.f_optimal_ghz = opt.freq_ghz;
  res.rate_at_optimal = opt.rate;
  res.dc_equilibrium_rate = dc.rate;
  res.dc_pump = dc.pump;
  res.enhancement = opt.rate / dc.rate - 1.0;
  res.has_band = opt.rate > dc.rate;

  // Ideal instantaneous-reset comparison: how the high edge would move with
  // a lossless reset (sensitivity of the band to the pulse model).
  const auto ideal_rate = [&](double f) {
    return ideal_reset_pairs_per_cycle(params, 1000.0 / f) * f;
  };
  const double f_ideal_opt =
      _golden_max(ideal_rate, 1e-3, 100.0, 1e-7);
  if (ideal_rate(f_ideal_opt) > dc.rate) {
    const auto g_ideal = [&](double f) { return ideal_rate(f) - dc.rate; };
    res.f_low_ideal_ghz = _bisect(g_ideal, 1e-3, f_ideal_opt, 1e-4);
    res.f_high_ideal_ghz = _bisect(g_ideal, f_ideal_opt, 100.0, 1e-4);
  }

  if (!res.has_band) return res;

  const auto g = [&](double f) {
    return pair_rate(params, _at_freq(w_template, f)) - dc.rate;
  };
  if (g(f_lo_ghz) >= 0) {
    res.f_low_ghz = f_lo_ghz;
    res.low_edge_clipped = true;
  } else {
    res.f_low_ghz = _bisect(g, f_lo_ghz, opt.freq_ghz, 1e-4);
  }
  if (g(f_hi_ghz) >= 0) {
    res.f_high_ghz = f_hi_ghz;
    res.high_edge_clipped = true;
  } else {
    res.f_high_ghz = _bisect(g, opt.freq_ghz, f_hi_ghz, 1e-4);
  }
  return res;
}

}  // namespace qdc
