#include "qdcascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qdc {

namespace {

void _require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Populations::validate(double tol) const {
  _require(g >= -tol && g <= 1 + tol, "populations: g outside [0, 1]");
  _require(x >= -tol && x <= 1 + tol, "populations: x outside [0, 1]");
  _require(xx >= -tol && xx <= 1 + tol, "populations: xx outside [0, 1]");
  _require(std::abs(sum() - 1.0) <= tol, "populations: sum != 1");
}

void DeviceParams::validate() const {
  _require(tau_xx > 0, "device: tau_xx must be > 0 ps");
  _require(tau_x > 0, "device: tau_x must be > 0 ps");
  _require(tunnel_rate >= 0, "device: tunnel_rate must be >= 0");
  _require(f0 >= 0.25 && f0 <= 1.0, "device: f0 must lie in [0.25, 1]");
  _require(t_coh > 0, "device: t_coh must be > 0 ps");
  _require(std::isfinite(fss_omega), "device: fss_omega must be finite");
}

void DriveWaveform::validate() const {
  _require(period > 0, "waveform: period must be > 0 ps");
  _require(dc_rate >= 0, "waveform: dc_rate must be >= 0");
  _require(pulse_rate >= 0, "waveform: pulse_rate must be >= 0");
  _require(pulse_width >= 0 && pulse_width <= period,
           "waveform: pulse_width must lie in [0, period]");
  _require(phase >= 0 && phase < period,
           "waveform: phase must lie in [0, period)");
}

DriveWaveform DriveWaveform::dc(double rate, double analysis_period) {
  DriveWaveform w;
  w.dc_rate = rate;
  w.period = analysis_period;
  w.validate();
  return w;
}

DriveWaveform DriveWaveform::pulsed(double period, double pulse_rate,
                                    double pulse_width, double dc_floor,
                                    double phase) {
  DriveWaveform w;
  w.period = period;
  w.pulse_rate = pulse_rate;
  w.pulse_width = pulse_width;
  w.dc_rate = dc_floor;
  w.phase = phase;
  w.validate();
  return w;
}

double pump_rate_at(const DriveWaveform& w, double t) {
  double u = std::fmod(t - w.phase, w.period);
  if (u < 0) u += w.period;
  return w.dc_rate + (u < w.pulse_width ? w.pulse_rate : 0.0);
}

double next_pump_boundary(const DriveWaveform& w, double t) {
  if (w.pulse_width <= 0 || w.pulse_width >= w.period || w.pulse_rate == 0) {
    // No edges within the cycle; the next boundary is the next cycle mark
    // (kept so steppers still land on cycle origins).
    const double k = std::floor(t / w.period) + 1;
    return k * w.period;
  }
  double u = std::fmod(t - w.phase, w.period);
  if (u < 0) u += w.period;
  const double step = (u < w.pulse_width) ? w.pulse_width - u : w.period - u;
  const double next = t + step;
  // When t sits within one ulp of an edge the sum can round back onto t;
  // callers rely on strict progress, so step at least one ulp.
  if (next <= t) return std::nextafter(t, std::numeric_limits<double>::infinity());
  return next;
}

CycleSegments cycle_segments(const DriveWaveform& w) {
  CycleSegments s;
  const double T = w.period;
  const bool has_pulse =
      w.pulse_rate > 0 && w.pulse_width > 0 && w.pulse_width < T;
  if (!has_pulse) {
    s.bounds = {0.0, T};
    s.pumps = {w.dc_rate + (w.pulse_width >= T ? w.pulse_rate : 0.0)};
    return s;
  }
  const double start = w.phase;
  const double end = std::fmod(w.phase + w.pulse_width, T);
  std::vector<double> cuts = {0.0, T};
  for (double c : {start, end})
    if (c > 0 && c < T) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());
  s.bounds = cuts;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    s.pumps.push_back(pump_rate_at(w, mid));
  }
  return s;
}

RateMatrix generator(const DeviceParams& params, double pump) {
  if (pump < 0) throw std::invalid_argument("generator: pump must be >= 0");
  params.validate();
  const double a = params.a();
  const double b = params.b();
  const double k = params.tunnel_rate;
  // Columns are from-states (G, X, XX); each column sums to zero.
  RateMatrix m{};
  m[0][0] = -pump;
  m[0][1] = b + k;
  m[0][2] = 0.0;
  m[1][0] = pump;
  m[1][1] = -(b + k + pump);
  m[1][2] = a + k;
  m[2][0] = 0.0;
  m[2][1] = pump;
  m[2][2] = -(a + k);
  return m;
}

}  // namespace qdc
