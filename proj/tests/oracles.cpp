#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace orc {

Rates rates_of(const qdc::DeviceParams& p) {
  return Rates{1.0 / p.tau_xx, 1.0 / p.tau_x, p.tunnel_rate};
}

Wave wave_of(const qdc::DriveWaveform& w) {
  return Wave{w.dc_rate, w.pulse_rate, w.pulse_width, w.period, w.phase};
}

double Wave::at(double t) const {
  if (period <= 0 || pulse == 0 || width <= 0) return dc;
  if (width >= period) return dc + pulse;
  double u = std::fmod(t - phase, period);
  if (u < 0) u += period;
  return dc + (u < width ? pulse : 0.0);
}

double Wave::next_edge(double t) const {
  if (period <= 0 || pulse == 0 || width <= 0 || width >= period)
    return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (double off : {phase, phase + width}) {
    double k = std::floor((t - off) / period);
    double cand = off + k * period;
    while (cand <= t + 1e-12) cand += period;
    best = std::min(best, cand);
  }
  return best;
}

State rhs(const Rates& r, double pump, const State& s) {
  const double g = s[0], x = s[1], xx = s[2];
  return State{(r.b + r.k) * x - pump * g,
               pump * g + (r.a + r.k) * xx - (r.b + r.k + pump) * x,
               pump * x - (r.a + r.k) * xx};
}

State rk4_const(const Rates& r, double pump, State s, double dt, int n) {
  for (int i = 0; i < n; ++i) {
    const State k1 = rhs(r, pump, s);
    State tmp;
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + 0.5 * dt * k1[j];
    const State k2 = rhs(r, pump, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + 0.5 * dt * k2[j];
    const State k3 = rhs(r, pump, tmp);
    for (int j = 0; j < 3; ++j) tmp[j] = s[j] + dt * k3[j];
    const State k4 = rhs(r, pump, tmp);
    for (int j = 0; j < 3; ++j)
      s[j] += dt / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return s;
}

State rk4_span(const Rates& r, const Wave& w, State s, double t0, double t1,
               double h) {
  double t = t0;
  while (t < t1 - 1e-12) {
    const double stop = std::min(w.next_edge(t), t1);
    const double len = stop - t;
    const int n = std::max(1, static_cast<int>(std::ceil(len / h)));
    const double pump = w.at(t + 0.5 * len / n);
    s = rk4_const(r, pump, s, len / n, n);
    t = stop;
  }
  return s;
}

State rk4_pss(const Rates& r, const Wave& w, double h, int max_cycles) {
  State s{1, 0, 0};
  for (int c = 0; c < max_cycles; ++c) {
    const State next = rk4_span(r, w, s, 0.0, w.period, h);
    double delta = 0;
    for (int j = 0; j < 3; ++j) delta = std::max(delta, std::abs(next[j] - s[j]));
    s = next;
    if (delta < 1e-13) break;
  }
  return s;
}

namespace {

// Probability that the daughter (decay rate b, losses k + pump + extra)
// created at absolute time t1 emits radiatively before t1 + cap.  Exact per
// constant-pump segment: each segment contributes
// b * exp(-acc) * (1 - exp(-c * len)) / c.
double daughter_yield_walk(const Rates& r, const Wave& w, double t1,
                           double cap, double extra_rate) {
  double acc = 0, integral = 0, tau = 0;
  while (tau < cap && acc < 60.0) {
    const double t_abs = t1 + tau;
    const double stop = std::min(w.next_edge(t_abs), t1 + cap);
    const double len = stop - t_abs;
    if (len <= 0) break;
    const double c = r.b + r.k + extra_rate + w.at(t_abs + 0.5 * std::min(len, 1.0));
    integral += r.b * std::exp(-acc) * (1.0 - std::exp(-c * len)) / c;
    acc += c * len;
    tau += len;
  }
  return integral;
}

}  // namespace

double pair_integral(const Rates& r, const Wave& w, double extra_rate,
                     bool same_cycle_only, double h1) {
  const double T = w.period;
  const State s0 = rk4_pss(r, w);

  // Segment bounds of one cycle so trapezoid nodes align with pump kinks.
  std::vector<double> bounds{0.0};
  double t = 0;
  while (true) {
    const double e = w.next_edge(t);
    if (e >= T - 1e-12) break;
    bounds.push_back(e);
    t = e;
  }
  bounds.push_back(T);

  const double horizon =
      same_cycle_only ? T : 60.0 / (r.b + extra_rate);
  double total = 0;
  State s = s0;
  double t_prev = 0;
  double f_prev = r.a * s[2] *
                  daughter_yield_walk(r, w, 0.0,
                                      same_cycle_only ? T : horizon, extra_rate);
  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    const double lo = bounds[seg], hi = bounds[seg + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h1)));
    for (int i = 1; i <= n; ++i) {
      const double ti = lo + (hi - lo) * i / n;
      s = rk4_span(r, w, s, t_prev, ti, 0.02);
      const double cap = same_cycle_only ? (T - ti) : horizon;
      const double f =
          r.a * s[2] * daughter_yield_walk(r, w, ti, cap, extra_rate);
      total += 0.5 * (f_prev + f) * (ti - t_prev);
      f_prev = f;
      t_prev = ti;
    }
  }
  return total;
}

double survival_exponent(const Rates& r, const Wave& w, double t1, double t2,
                         int n) {
  // Midpoint rule; the integrand is piecewise constant so the only error
  // comes from steps straddling pump edges.
  double acc = 0;
  const double h = (t2 - t1) / n;
  for (int i = 0; i < n; ++i)
    acc += (r.b + r.k + w.at(t1 + (i + 0.5) * h)) * h;
  return acc;
}

double full_reset_pair_probability(const Rates& r, double T, double h) {
  State s{0, 0, 1};
  const int n = std::max(1, static_cast<int>(std::ceil(T / h)));
  const double dt = T / n;
  double flux = 0;
  for (int i = 0; i < n; ++i) {
    const double x_before = s[1];
    s = rk4_const(r, 0.0, s, dt, 1);
    flux += 0.5 * (x_before + s[1]) * r.b * dt;
  }
  return flux;
}

std::array<double, 4> werner_probs(qdc::Basis basis, double V, double phi) {
  using C = std::complex<double>;
  const double rt = 1.0 / std::sqrt(2.0);
  auto port = [&](int idx) -> std::array<C, 2> {
    switch (basis) {
      case qdc::Basis::Rectilinear:
        return idx == 0 ? std::array<C, 2>{1.0, 0.0}
                        : std::array<C, 2>{0.0, 1.0};
      case qdc::Basis::Diagonal:
        return idx == 0 ? std::array<C, 2>{rt, rt}
                        : std::array<C, 2>{rt, -rt};
      default:
        return idx == 0 ? std::array<C, 2>{rt, C(0.0, 1.0) * rt}
                        : std::array<C, 2>{rt, C(0.0, -1.0) * rt};
    }
  };
  // |Phi(phi)> components in the HV x HV product basis.
  const C psi_hh = rt;
  const C psi_vv = rt * std::exp(C(0.0, phi));
  std::array<double, 4> probs{};
  for (int o1 = 0; o1 < 2; ++o1) {
    for (int o2 = 0; o2 < 2; ++o2) {
      const auto u = port(o1);
      const auto v = port(o2);
      const C amp = std::conj(u[0]) * std::conj(v[0]) * psi_hh +
                    std::conj(u[1]) * std::conj(v[1]) * psi_vv;
      probs[o1 * 2 + o2] = V * std::norm(amp) + (1.0 - V) / 4.0;
    }
  }
  return probs;
}

double ks_stat(std::vector<double> samples,
               const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

std::vector<qdc::TimeTag> poisson_tags(double rate_per_ps, double duration_ps,
                                       uint8_t channel, std::mt19937_64& rng) {
  std::vector<qdc::TimeTag> tags;
  std::exponential_distribution<double> gap(rate_per_ps);
  double t = gap(rng);
  while (t < duration_ps) {
    tags.push_back({static_cast<uint64_t>(std::llround(t)), channel});
    t += gap(rng);
  }
  return tags;
}

std::vector<qdc::TimeTag> single_emitter_tags(double period, uint64_t n_cycles,
                                              double tau_decay,
                                              uint8_t channel,
                                              std::mt19937_64& rng) {
  std::vector<qdc::TimeTag> tags;
  tags.reserve(n_cycles);
  std::exponential_distribution<double> decay(1.0 / tau_decay);
  for (uint64_t k = 0; k < n_cycles; ++k) {
    const double t = static_cast<double>(k) * period + decay(rng);
    tags.push_back({static_cast<uint64_t>(std::llround(t)), channel});
  }
  return tags;
}

std::vector<qdc::TimeTag> werner_pair_tags(const WernerStreamSpec& spec,
                                           uint64_t n_cycles,
                                           std::mt19937_64& rng) {
  std::vector<qdc::TimeTag> tags;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::exponential_distribution<double> parent(1.0 / spec.tau_parent);
  std::exponential_distribution<double> child(1.0 / spec.tau_child);
  const auto probs = werner_probs(spec.basis, spec.V, spec.phi);
  const double cap = spec.period / 3.0;
  for (uint64_t k = 0; k < n_cycles; ++k) {
    if (uni(rng) >= spec.q) continue;
    double d1 = parent(rng);
    while (d1 >= cap) d1 = parent(rng);
    double tau = child(rng);
    while (tau >= cap) tau = child(rng);
    const double u = uni(rng);
    int outcome = 3;
    double acc = 0;
    for (int o = 0; o < 4; ++o) {
      acc += probs[o];
      if (u < acc) {
        outcome = o;
        break;
      }
    }
    const double t1 = static_cast<double>(k) * spec.period + d1;
    tags.push_back({static_cast<uint64_t>(std::llround(t1)),
                    static_cast<uint8_t>(outcome / 2)});
    tags.push_back({static_cast<uint64_t>(std::llround(t1 + tau)),
                    static_cast<uint8_t>(2 + outcome % 2)});
  }
  sort_tags(tags);
  return tags;
}

void sort_tags(std::vector<qdc::TimeTag>& tags) {
  std::sort(tags.begin(), tags.end(),
            [](const qdc::TimeTag& l, const qdc::TimeTag& rgt) {
              return l.timestamp != rgt.timestamp ? l.timestamp < rgt.timestamp
                                                  : l.channel < rgt.channel;
            });
}

}  // namespace orc
