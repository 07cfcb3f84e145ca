#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "qdcascade/optimize.hpp"

using namespace qdc;

namespace {

const DriveWaveform kPulseShape = DriveWaveform::pulsed(787.0, 0.2, 50.0);

}  // namespace

TEST_CASE("optimal_dc_pump: frozen optimum and local maximality") {
  DeviceParams params;
  const auto opt = optimal_dc_pump(params);
  CHECK(opt.pump == doctest::Approx(0.0044033330).epsilon(1e-5));
  CHECK(opt.rate == doctest::Approx(0.4955767786).epsilon(1e-8));
  // Nudging the pump by 1% in either direction can only lose rate.
  CHECK(dc_pair_rate(params, opt.pump * 1.01) <= opt.rate);
  CHECK(dc_pair_rate(params, opt.pump * 0.99) <= opt.rate);
  // The bracketing scan density must not matter after refinement.
  const auto coarse = optimal_dc_pump(params, 1e-5, 1.0, 60);
  CHECK(coarse.pump == doctest::Approx(opt.pump).epsilon(1e-6));
  CHECK(coarse.rate == doctest::Approx(opt.rate).epsilon(1e-10));
}

TEST_CASE("optimal_dc_pump scales linearly with the transition rates") {
  DeviceParams params;
  DeviceParams fast;
  fast.tau_xx = params.tau_xx / 2.0;
  fast.tau_x = params.tau_x / 2.0;
  const auto slow_opt = optimal_dc_pump(params);
  const auto fast_opt = optimal_dc_pump(fast);
  CHECK(fast_opt.pump == doctest::Approx(2.0 * slow_opt.pump).epsilon(1e-4));
  CHECK(fast_opt.rate == doctest::Approx(2.0 * slow_opt.rate).epsilon(1e-4));
}

TEST_CASE("optimal_clock_rate: frozen optimum for the canonical pulse") {
  DeviceParams params;
  const auto opt = optimal_clock_rate(params, kPulseShape);
  CHECK(opt.freq_ghz == doctest::Approx(1.2887086).epsilon(1e-4));
  CHECK(opt.rate == doctest::Approx(0.7166233).epsilon(1e-6));
  CHECK(opt.pairs_per_cycle == doctest::Approx(0.5560786).epsilon(1e-4));
  // Consistency: rate = pairs_per_cycle * f (pairs/ns = ppc * GHz).
  CHECK(opt.rate ==
        doctest::Approx(opt.pairs_per_cycle * opt.freq_ghz).epsilon(1e-9));
  // Evaluating the library metric at the reported optimum reproduces it.
  const auto w = DriveWaveform::pulsed(1000.0 / opt.freq_ghz, 0.2, 50.0);
  CHECK(pair_rate(params, w) == doctest::Approx(opt.rate).epsilon(1e-9));
  // Neighbouring frequencies do worse.
  for (double f : {opt.freq_ghz * 0.98, opt.freq_ghz * 1.02}) {
    const auto wn = DriveWaveform::pulsed(1000.0 / f, 0.2, 50.0);
    CHECK(pair_rate(params, wn) <= opt.rate);
  }
}

TEST_CASE("optimal_clock_rate scales with the transition rates") {
  // Halving every timescale (lifetimes, pulse width) and doubling the pulse
  // rate is an exact rescaling: the optimal clock doubles.
  DeviceParams params;
  DeviceParams fast;
  fast.tau_xx = params.tau_xx / 2.0;
  fast.tau_x = params.tau_x / 2.0;
  const auto slow_opt = optimal_clock_rate(params, kPulseShape);
  const auto fast_shape = DriveWaveform::pulsed(787.0, 0.4, 25.0);
  const auto fast_opt = optimal_clock_rate(fast, fast_shape);
  CHECK(fast_opt.freq_ghz ==
        doctest::Approx(2.0 * slow_opt.freq_ghz).epsilon(1e-3));
  CHECK(fast_opt.rate == doctest::Approx(2.0 * slow_opt.rate).epsilon(1e-3));
}

TEST_CASE("optimal_clock_rate throws when the maximum is not interior") {
  DeviceParams params;
  CHECK_THROWS_AS(optimal_clock_rate(params, kPulseShape, 5.0, 10.0),
                  std::runtime_error);
}

TEST_CASE("superequilibrium_band: frozen canonical band") {
  DeviceParams params;
  const auto band = superequilibrium_band(params, kPulseShape);
  REQUIRE(band.has_band);
  CHECK_FALSE(band.low_edge_clipped);
  CHECK_FALSE(band.high_edge_clipped);
  CHECK(band.f_low_ghz == doctest::Approx(0.5254872).epsilon(2e-3));
  CHECK(band.f_high_ghz == doctest::Approx(3.2382017).epsilon(2e-3));
  CHECK(band.f_optimal_ghz == doctest::Approx(1.2887086).epsilon(1e-4));
  CHECK(band.rate_at_optimal == doctest::Approx(0.7166233).epsilon(1e-6));
  CHECK(band.dc_pump == doctest::Approx(0.0044033).epsilon(1e-4));
  CHECK(band.dc_equilibrium_rate ==
        doctest::Approx(0.4955768).epsilon(1e-7));
  CHECK(band.enhancement == doctest::Approx(0.4460390).epsilon(1e-5));
  CHECK(band.enhancement ==
        doctest::Approx(band.rate_at_optimal / band.dc_equilibrium_rate - 1.0)
            .epsilon(1e-12));
  // Sensitivity companion: the idealized instantaneous-reset band.
  CHECK(band.f_low_ideal_ghz == doctest::Approx(0.5227588).epsilon(2e-3));
  CHECK(band.f_high_ideal_ghz == doctest::Approx(4.6336746).epsilon(2e-3));
  CHECK(band.f_low_ideal_ghz < band.f_low_ghz);
  CHECK(band.f_high_ideal_ghz > band.f_high_ghz);
}

TEST_CASE("superequilibrium_band edges actually cross the dc optimum") {
  DeviceParams params;
  const auto band = superequilibrium_band(params, kPulseShape);
  auto rate_at = [&](double f_ghz) {
    return pair_rate(params,
                     DriveWaveform::pulsed(1000.0 / f_ghz, 0.2, 50.0));
  };
  const double dc = band.dc_equilibrium_rate;
  CHECK(rate_at(band.f_low_ghz * 1.02) > dc);
  CHECK(rate_at(band.f_low_ghz * 0.98) < dc);
  CHECK(rate_at(band.f_high_ghz * 0.98) > dc);
  CHECK(rate_at(band.f_high_ghz * 1.02) < dc);
  CHECK(rate_at(0.4) < dc);
  CHECK(rate_at(4.0) < dc);
}

TEST_CASE("superequilibrium_band: no pulse means no band, not an exception") {
  DeviceParams params;
  DriveWaveform flat;
  flat.period = 787.0;
  flat.pulse_rate = 0.0;
  flat.pulse_width = 50.0;
  const auto band = superequilibrium_band(params, flat);
  CHECK_FALSE(band.has_band);
  CHECK(band.dc_equilibrium_rate > 0.49);
}

TEST_CASE("superequilibrium_band: weak pulses never beat the dc optimum") {
  DeviceParams params;
  const auto weak = DriveWaveform::pulsed(787.0, 0.004, 50.0);
  const auto band = superequilibrium_band(params, weak);
  CHECK_FALSE(band.has_band);
}

TEST_CASE("superequilibrium_band: clipped edges are flagged") {
  DeviceParams params;
  const auto band = superequilibrium_band(params, kPulseShape, 0.8, 1.5);
  REQUIRE(band.has_band);
  CHECK(band.low_edge_clipped);
  CHECK(band.high_edge_clipped);
  CHECK(band.f_low_ghz == doctest::Approx(0.8));
  CHECK(band.f_high_ghz == doctest::Approx(1.5));
}

TEST_CASE("ideal_reset_pairs_per_cycle: frozen value and RK4 flux oracle") {
  DeviceParams params;
  CHECK(ideal_reset_pairs_per_cycle(params, 787.0) ==
        doctest::Approx(0.5908042265).epsilon(1e-9));
  const auto r = orc::rates_of(params);
  for (double T : {100.0, 787.0, 4000.0}) {
    CHECK(ideal_reset_pairs_per_cycle(params, T) ==
          doctest::Approx(orc::full_reset_pair_probability(r, T))
              .epsilon(1e-7));
  }
  // Limits: long cycles complete every cascade, short ones none.
  CHECK(ideal_reset_pairs_per_cycle(params, 1e7) == doctest::Approx(1.0));
  CHECK(ideal_reset_pairs_per_cycle(params, 0.01) <
        1e-6);
}

TEST_CASE("ideal_reset_pairs_per_cycle handles equal lifetimes") {
  DeviceParams params;
  params.tau_xx = 400.0;
  params.tau_x = 400.0;
  // Degenerate rates: 1 - e^{-T/tau} (1 + T/tau).
  for (double T : {200.0, 800.0, 3000.0}) {
    const double u = T / 400.0;
    const double expected = 1.0 - std::exp(-u) * (1.0 + u);
    CHECK(ideal_reset_pairs_per_cycle(params, T) ==
          doctest::Approx(expected).epsilon(1e-7));
    CHECK(ideal_reset_pairs_per_cycle(params, T) ==
          doctest::Approx(orc::full_reset_pair_probability(
                              orc::rates_of(params), T))
              .epsilon(1e-7));
  }
}
