#include "qdcascade/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "qdcascade/metrics.hpp"
#include "qdcascade/rng.hpp"

namespace qdc {

namespace {

// Cycles per RNG substream block.  Waiting times are truncated and resampled
// at block boundaries (memoryless), so the stream identity of every draw is a
// pure function of the seed and the block index.
constexpr uint64_t kBlockCycles = 4096;

}  // namespace

std::vector<EmissionEvent> simulate_emissions(const DeviceParams& params,
                                              const DriveWaveform& w,
                                              double duration, uint64_t seed,
                                              Level initial) {
  params.validate();
  w.validate();
  if (duration < 0)
    throw std::invalid_argument("simulate_emissions: duration must be >= 0");

  const double a = params.a();
  const double b = params.b();
  const double k = params.tunnel_rate;
  const double block_len = kBlockCycles * w.period;

  std::vector<EmissionEvent> events;
  events.reserve(static_cast<size_t>(duration / w.period * 2) + 16);

  Level state = initial;
  double t = 0;
  uint64_t block = 0;
  SubstreamRng rng(seed, block);
  double next_block_t = block_len;
  int64_t pending_parent = -1;  // XX photon index feeding the current X
  int64_t next_id = 0;

  while (t < duration) {
    const double pump = pump_rate_at(w, t);
    const double boundary =
        std::min({next_pump_boundary(w, t), next_block_t, duration});
    double total = 0;
    switch (state) {
      case Level::Ground:
        total = pump;
        break;
      case Level::Exciton:
        total = b + pump + k;
        break;
      case Level::Biexciton:
        total = a + k;
        break;
    }

    double t_jump = boundary;
    if (total > 0) t_jump = t + rng.exponential(total);
    if (t_jump >= boundary) {
      t = boundary;
      if (t >= next_block_t) {
        rng = SubstreamRng(seed, ++block);
        next_block_t += block_len;
      }
      continue;
    }
    t = t_jump;

    const double u = rng.uniform() * total;
    switch (state) {
      case Level::Ground:
        state = Level::Exciton;
        pending_parent = -1;
        break;
      case Level::Exciton:
        if (u < b) {
          EmissionEvent ev;
          ev.time = t;
          ev.kind = PhotonKind::Exciton;
          ev.cycle_index = static_cast<uint64_t>(t / w.period);
          if (pending_parent >= 0) {
            const int64_t id = next_id++;
            events[pending_parent].cascade_id = id;
            ev.cascade_id = id;
          }
          events.push_back(ev);
          state = Level::Ground;
        } else if (u < b + pump) {
          state = Level::Biexciton;
        } else {
          state = Level::Ground;  // tunnel escape, no photon
        }
        pending_parent = -1;
        break;
      case Level::Biexciton:
        if (u < a) {
          EmissionEvent ev;
          ev.time = t;
          ev.kind = PhotonKind::Biexciton;
          ev.cycle_index = static_cast<uint64_t>(t / w.period);
          events.push_back(ev);
          pending_parent = static_cast<int64_t>(events.size()) - 1;
        } else {
          pending_parent = -1;  // tunnel XX->X: not a radiative parent
        }
        state = Level::Exciton;
        break;
    }
  }
  return events;
}

std::vector<uint8_t> assign_polarizations(const std::vector<EmissionEvent>& events,
                                          const DeviceParams& params,
                                          Basis basis, FrameMode mode,
                                          uint64_t seed) {
  params.validate();
  // Partner lookup: cascade_id -> X photon index.
  std::unordered_map<int64_t, size_t> daughter;
  for (size_t i = 0; i < events.size(); ++i)
    if (events[i].cascade_id >= 0 && events[i].kind == PhotonKind::Exciton)
      daughter[events[i].cascade_id] = i;

  SubstreamRng rng(seed, 0x706f6cull);  // one stream, consumed in event order
  std::vector<uint8_t> channels(events.size(), 255);

  for (size_t i = 0; i < events.size(); ++i) {
    const EmissionEvent& ev = events[i];
    const bool linked =
        ev.cascade_id >= 0 && daughter.count(ev.cascade_id) > 0;
    if (linked && ev.kind == PhotonKind::Biexciton) {
      const size_t j = daughter[ev.cascade_id];
      const double tau = events[j].time - ev.time;
      const double v = pair_visibility(params, tau);
      const double c = mode == FrameMode::StaticBasis
                           ? std::cos(params.fss_omega * tau)
                           : 1.0;
      // P(outcome) over (XX, X) in {co,co}, {cross,cross}, {co,cross},
      // {cross,co}; Werner state projected onto the measurement basis.
      double p_same;
      switch (basis) {
        case Basis::Rectilinear: p_same = (1.0 + v) / 4.0; break;
        case Basis::Diagonal:    p_same = (1.0 + v * c) / 4.0; break;
        case Basis::Circular:    p_same = (1.0 - v * c) / 4.0; break;
        default: throw std::invalid_argument("assign_polarizations: bad basis");
      }
      const double u = rng.uniform();
      bool xx_co, x_co;
      if (u < p_same) {
        xx_co = x_co = true;
      } else if (u < 2 * p_same) {
        xx_co = x_co = false;
      } else if (u < 2 * p_same + (0.5 - p_same)) {
        xx_co = true;
        x_co = false;
      } else {
        xx_co = false;
        x_co = true;
      }
      channels[i] = xx_co ? 0 : 1;
      channels[j] = x_co ? 2 : 3;
    } else if (channels[i] == 255 && !(linked && ev.kind == PhotonKind::Exciton)) {
      // Unlinked photons are unpolarized.
      const bool co = rng.uniform() < 0.5;
      channels[i] = ev.kind == PhotonKind::Biexciton ? (co ? 0 : 1)
                                                     : (co ? 2 : 3);
    }
  }
  return channels;
}

void DetectorModel::validate() const {
  for (double e : efficiency)
    if (!(e >= 0 && e <= 1))
      throw std::invalid_argument("detector: efficiency must lie in [0, 1]");
  if (jitter_sigma < 0)
    throw std::invalid_argument("detector: jitter_sigma must be >= 0");
  for (double d : dark_rate)
    if (d < 0)
      throw std::invalid_argument("detector: dark_rate must be >= 0");
}

std::vector<TimeTag> detect(const std::vector<EmissionEvent>& events,
                            const std::vector<uint8_t>& channels,
                            const DetectorModel& det, double duration,
                            uint64_t seed) {
  det.validate();
  if (channels.size() != events.size())
    throw std::invalid_argument("detect: one channel per event required");
  if (duration < 0)
    throw std::invalid_argument("detect: duration must be >= 0");

  std::vector<TimeTag> tags;
  tags.reserve(events.size());
  SubstreamRng rng(seed, 0xde7ec7ull);
  for (size_t i = 0; i < events.size(); ++i) {
    const uint8_t ch = channels[i];
    if (ch >= kChannels)
      throw std::invalid_argument("detect: channel out of range");
    if (rng.uniform() >= det.efficiency[ch]) continue;
    double t = events[i].time;
    if (det.jitter_sigma > 0) t += rng.normal(det.jitter_sigma);
    // Gate on the rounded stamp so values just under `duration` cannot round
    // up onto it.
    const long long ts = std::llround(t);
    if (ts < 0 || static_cast<double>(ts) >= duration) continue;
    tags.push_back(TimeTag{static_cast<uint64_t>(ts), ch});
  }
  for (uint8_t ch = 0; ch < kChannels; ++ch) {
    if (det.dark_rate[ch] <= 0) continue;
    SubstreamRng dark_rng(seed, 0xda2cull + ch);
    double t = dark_rng.exponential(det.dark_rate[ch]);
    while (t < duration) {
      const long long ts = std::llround(t);
      if (static_cast<double>(ts) < duration)
        tags.push_back(TimeTag{static_cast<uint64_t>(ts), ch});
      t += dark_rng.exponential(det.dark_rate[ch]);
    }
  }
  std::sort(tags.begin(), tags.end(), [](const TimeTag& l, const TimeTag& r) {
    return l.timestamp != r.timestamp ? l.timestamp < r.timestamp
                                      : l.channel < r.channel;
  });
  return tags;
}

}  // namespace qdc
