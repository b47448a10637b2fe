// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spadfab/edge_stream.hpp"
#include "spadfab/rng.hpp"
#include "spadfab/spad.hpp"

namespace spadfab {

namespace detail {
// Substream salts keep background and laser draws independent, so changing
// one stimulus component never perturbs the other.
inline constexpr std::uint64_t kBackgroundSalt = 0xB16B00B5;
inline constexpr std::uint64_t kLaserSalt = 0x1A5E12;
}  // namespace detail

/// Photon/dark arrival times for one SPAD over [0, duration], sorted and
/// strictly increasing (equal draws are bumped +1 ps), in integer ps.
///
/// Background and dark counts form one homogeneous Poisson process at rate
/// background_flux_hz * pde + dcr_hz (PDE thinning folded into the rate).
/// Each laser pulse contributes Poisson(signal_mean * pde) arrivals at
/// tof + Gaussian jitter. Deterministic given (seed, stream_id).
inline std::vector<std::int64_t> generate_arrivals(const Scene& scene,
                                                   const SpadParams& params,
                                                   std::uint64_t seed,
                                                   std::uint64_t stream_id) {
  scene.validate();
  params.validate();
  std::vector<std::int64_t> times;

  const double rate_hz = scene.background_flux_hz * params.pde + params.dcr_hz;
  if (rate_hz > 0.0 && scene.duration_ps > 0) {
    StreamRng rng(seed, stream_id, detail::kBackgroundSalt);
    const double mean_gap_ps = 1e12 / rate_hz;
    double t = 0.0;
    const double horizon = static_cast<double>(scene.duration_ps);
    for (;;) {
      t += rng.next_exp(mean_gap_ps);
      if (t > horizon) break;
      times.push_back(std::llround(t));
    }
  }

  if (scene.laser && scene.laser->signal_photons_per_pulse_mean > 0.0) {
    const LaserSpec& laser = *scene.laser;
    StreamRng rng(seed, stream_id, detail::kLaserSalt);
    const double mean = laser.signal_photons_per_pulse_mean * params.pde;
    const auto n_pulses = static_cast<std::uint64_t>(
        static_cast<double>(scene.duration_ps) * laser.rep_rate_hz / 1e12);
    for (std::uint64_t p = 0; p < n_pulses; ++p) {
      const std::int64_t emission = laser_emission_ps(p, laser.rep_rate_hz);
      const std::uint64_t n = rng.next_poisson(mean);
      for (std::uint64_t i = 0; i < n; ++i) {
        const double jitter = rng.next_gauss() * laser.jitter_sigma_ps;
        const std::int64_t t = emission + laser.tof_ps + std::llround(jitter);
        if (t >= 0 && t <= scene.duration_ps) times.push_back(t);
      }
    }
  }

  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) times[i] = times[i - 1] + 1;
  return times;
}

/// Shape accepted arrivals into the SPAD output pulse train.
///
/// Non-paralyzable (default): an arrival at t is accepted iff
/// t >= last_accepted + dead_time; it emits a pulse [t, t + pulse_width).
/// Paralyzable: every arrival restarts the blind interval, so an arrival
/// is accepted iff it is more than a dead time after the previous arrival.
/// Back-to-back pulses whose gap closes to zero merge into one level-high
/// interval so the stream invariants always hold.
inline EdgeStream shape_pulses(const std::vector<std::int64_t>& arrivals,
                               const SpadParams& params) {
  params.validate();
  EdgeStream out;
  std::int64_t gate = std::numeric_limits<std::int64_t>::min();
  std::int64_t open_fall = std::numeric_limits<std::int64_t>::min();
  bool open = false;
  for (const std::int64_t t : arrivals) {
    const bool accepted = t >= gate;
    if (params.paralyzable || accepted) gate = t + params.dead_time_ps;
    if (!accepted) continue;
    const std::int64_t fall = t + params.pulse_width_ps;
    if (open && t <= open_fall) {
      // Retrigger exactly at the falling edge: extend the pulse.
      open_fall = fall;
      continue;
    }
    if (open) out.edges.push_back({open_fall, false});
    out.edges.push_back({t, true});
    open = true;
    open_fall = fall;
  }
  if (open) out.edges.push_back({open_fall, false});
  return out;
}

/// Convenience: generate and shape one SPAD output stream.
inline EdgeStream spad_stream(const Scene& scene, const SpadParams& params,
                              std::uint64_t seed, std::uint64_t stream_id) {
  return shape_pulses(generate_arrivals(scene, params, seed, stream_id),
                      params);
}

}  // namespace spadfab
