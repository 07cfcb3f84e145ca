#pragma once
// Counter-based random substreams: every (master seed, stream id) pair yields
// an independent, platform-stable sequence, so trajectory blocks can be
// generated and merged reproducibly.  splitmix64 core with hand-rolled
// variate transforms (std:: distributions are implementation-defined).

#include <cmath>
#include <cstdint>

namespace qdc {

class SubstreamRng {
 public:
  SubstreamRng(uint64_t master, uint64_t stream) {
    state_ = mix(master ^ mix(stream + 0x9E3779B97F4A7C15ull));
  }

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal(double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_ * sigma;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 6.283185307179586477 * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta) * sigma;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  uint64_t state_ = 0;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace qdc
