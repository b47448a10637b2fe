// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spadfab/arrivals.hpp"
#include "spadfab/array.hpp"
#include "spadfab/combinator.hpp"
#include "spadfab/edge_stream.hpp"
#include "spadfab/event_engine.hpp"
#include "spadfab/fabric.hpp"
#include "spadfab/readout.hpp"
#include "spadfab/spad.hpp"

namespace spadfab {

/// Experiment scale. The desk profile shrinks the reference protocol
/// (1 s integration, 100 repeats) to something CI-sized while keeping the
/// same statistics contracts.
struct Profile {
  std::string name = "desk";
  double integration_s = 0.01;
  int n_seeds = 20;
  std::uint64_t tof_frames = 10000;
};

inline Profile desk_profile() { return {}; }
inline Profile paper_profile() { return {"paper", 1.0, 100, 100000}; }

/// Accepted (post-dead-time) rate for a non-paralyzable detector seeing a
/// Poisson arrival rate pde*flux + dcr.
inline double accepted_rate_hz(const SpadParams& params, double flux_hz) {
  const double lambda = params.pde * flux_hz + params.dcr_hz;
  return lambda / (1.0 + lambda * params.dead_time_ps * 1e-12);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

/// Sample standard deviation (n-1 denominator).
inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

/// Shortest round-trip decimal form; locale-independent, so reruns are
/// byte-identical.
inline std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline void write_csv_preamble(std::ostream& os, const std::string& scenario,
                               const Profile& profile, std::uint64_t seed,
                               bool timestamp) {
  if (timestamp) {
    char buf[64];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    os << "# generated " << buf << "\n";
  }
  os << "# scenario=" << scenario << " profile=" << profile.name
     << " integration_s=" << fmt_double(profile.integration_s)
     << " seeds=" << profile.n_seeds << " seed=" << seed << "\n";
}

// -- Tree configs -------------------------------------------------------------

/// Two-level tree applying `kind` over the first n of 16 SPADs. Leaves with
/// no active input compile to constant 0, which is absorbed by an OR or XOR
/// root; AND uses a root restricted to populated leaves.
inline NetworkSpec tree_network(CombinatorKind kind, int n_spads) {
  if (n_spads < 1 || n_spads > 16)
    throw InvalidSpec("tree size must be 1..16 SPADs");
  const std::uint32_t active = (n_spads == 16) ? 0xFFFFu
                                               : ((1u << n_spads) - 1u);
  auto leaf_spec = [&](int j) {
    const std::uint8_t mask = std::uint8_t((active >> (4 * j)) & 0xFu);
    switch (kind) {
      case CombinatorKind::Or: return or_of(mask);
      case CombinatorKind::Xor: return xor_of(mask);
      case CombinatorKind::And: return and_of(mask);
      default: throw InvalidSpec("tree kind must be or/and/xor");
    }
  };
  std::uint8_t root_mask = 0;
  for (int j = 0; j < 4; ++j)
    if ((active >> (4 * j)) & 0xFu) root_mask |= std::uint8_t(1u << j);
  NetworkSpec net;
  for (int j = 0; j < 4; ++j) net.leaves[j] = leaf_spec(j);
  switch (kind) {
    case CombinatorKind::Or: net.root = or_of(); break;
    case CombinatorKind::Xor: net.root = xor_of(); break;
    case CombinatorKind::And: net.root = and_of(root_mask); break;
    default: throw InvalidSpec("tree kind must be or/and/xor");
  }
  return net;
}

/// Generate the active SPAD streams for one replicate, de-tied as a group,
/// and run them through the test-chip tree.
inline EdgeStream run_tree(const Scene& scene, const SpadParams& params,
                           const TestChipConfig& config, int n_spads,
                           std::uint64_t seed) {
  std::array<EdgeStream, 16> streams;
  for (int s = 0; s < n_spads; ++s)
    streams[s] = spad_stream(scene, params, seed, std::uint64_t(s));
  detie_streams(std::span<EdgeStream>(streams.data(), std::size_t(n_spads)));
  return simulate_network(streams, config);
}

// -- Linearity sweep ----------------------------------------------------------

struct SweepRow {
  double flux_hz = 0;
  int n_spads = 0;
  std::string setting;  // bias label for OR sweeps, empty for XOR
  double mean_count = 0;
  double std_count = 0;
  double expected_count = 0;  // accepted-rate model, XOR sweeps only
};

/// XOR-tree counting sweep: mean/std of the root rising-edge count over
/// n_seeds replicates for each (flux, tree size) pair.
inline std::vector<SweepRow> xor_linearity_sweep(
    const std::vector<double>& flux_points, const std::vector<int>& n_spads,
    const SpadParams& params, double integration_s, int n_seeds,
    std::uint64_t seed) {
  params.validate();
  std::vector<SweepRow> rows;
  const std::int64_t t_ps = std::llround(integration_s * 1e12);
  for (double flux : flux_points) {
    for (int n : n_spads) {
      const TestChipConfig config =
          compile_network(tree_network(CombinatorKind::Xor, n));
      const Scene scene{flux, std::nullopt, t_ps};
      std::vector<double> counts;
      for (int r = 0; r < n_seeds; ++r) {
        const EdgeStream root =
            run_tree(scene, params, config, n, seed + std::uint64_t(r));
        counts.push_back(double(count_rising_edges(root, 0, t_ps)));
      }
      rows.push_back({flux, n, "", mean_of(counts), stddev_of(counts),
                      double(n) * accepted_rate_hz(params, flux) *
                          integration_s});
    }
  }
  return rows;
}

/// OR-tree counting sweep across bias settings (each a full SpadParams).
inline std::vector<SweepRow> or_bias_sweep(
    const std::vector<double>& flux_points,
    const std::vector<std::pair<std::string, SpadParams>>& settings,
    double integration_s, int n_seeds, std::uint64_t seed) {
  std::vector<SweepRow> rows;
  const std::int64_t t_ps = std::llround(integration_s * 1e12);
  const TestChipConfig config =
      compile_network(tree_network(CombinatorKind::Or, 16));
  for (double flux : flux_points) {
    for (const auto& [name, params] : settings) {
      params.validate();
      const Scene scene{flux, std::nullopt, t_ps};
      std::vector<double> counts;
      for (int r = 0; r < n_seeds; ++r) {
        const EdgeStream root =
            run_tree(scene, params, config, 16, seed + std::uint64_t(r));
        counts.push_back(double(count_rising_edges(root, 0, t_ps)));
      }
      rows.push_back(
          {flux, 16, name, mean_of(counts), stddev_of(counts), 0.0});
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::string& scenario,
                            const std::vector<SweepRow>& rows,
                            const Profile& profile, std::uint64_t seed,
                            bool timestamp) {
  write_csv_preamble(os, scenario, profile, seed, timestamp);
  os << "flux_hz,n_spads,setting,mean_count,std_count,expected_count\n";
  for (const auto& r : rows)
    os << fmt_double(r.flux_hz) << "," << r.n_spads << "," << r.setting
       << "," << fmt_double(r.mean_count) << "," << fmt_double(r.std_count)
       << "," << fmt_double(r.expected_count) << "\n";
}

// -- ToF comparison -----------------------------------------------------------

struct TofResult {
  std::string name;
  TofHistogram hist;
  std::uint64_t signal_counts = 0;
  std::uint64_t background_counts = 0;
  double sbr = 0;
  double sbr_sigma = 0;  // Poisson error propagation on S and B
  std::uint32_t window_lo = 0;
  std::uint32_t window_hi = 0;
};

/// Acquire the same de-tied 2x2 SPAD streams through several macropixel
/// tables and compare their histograms over a common signal window.
inline std::vector<TofResult> tof_compare(
    const Scene& scene, const SpadParams& params,
    const std::vector<std::pair<std::string, Lut16>>& tables,
    const TdcParams& tdc, std::uint64_t frames, std::int64_t signal_lo_ps,
    std::int64_t signal_hi_ps, std::uint64_t seed) {
  scene.validate();
  params.validate();
  tdc.validate();
  if (!scene.laser) throw ConfigError("ToF comparison needs a laser");
  std::array<EdgeStream, 4> streams;
  for (int s = 0; s < 4; ++s)
    streams[s] = spad_stream(scene, params, seed, std::uint64_t(s));
  detie_streams(streams);

  std::vector<TofResult> out;
  for (const auto& [name, lut] : tables) {
    TofResult res;
    res.name = name;
    const EdgeStream root = simulate_lut4(streams, lut);
    res.hist = acquire_tof(root, *scene.laser, tdc, frames);
    res.window_lo = std::uint32_t(signal_lo_ps / tdc.lsb_ps());
    res.window_hi = std::uint32_t(signal_hi_ps / tdc.lsb_ps());
    if (res.window_hi >= res.hist.reachable_codes)
      res.window_hi = res.hist.reachable_codes - 1;
    for (std::uint32_t c = 0; c < res.hist.reachable_codes; ++c) {
      if (c >= res.window_lo && c <= res.window_hi)
        res.signal_counts += res.hist.bins[c];
      else
        res.background_counts += res.hist.bins[c];
    }
    res.sbr = histogram_sbr(res.hist, res.window_lo, res.window_hi);
    if (res.signal_counts > 0 && res.background_counts > 0 &&
        res.sbr != kSbrInfinite)
      res.sbr_sigma = res.sbr * std::sqrt(1.0 / double(res.signal_counts) +
                                          1.0 / double(res.background_counts));
    out.push_back(std::move(res));
  }
  return out;
}

inline void write_tof_summary_csv(std::ostream& os,
                                  const std::vector<TofResult>& results,
                                  const Profile& profile, std::uint64_t seed,
                                  bool timestamp) {
  write_csv_preamble(os, "tof-compare", profile, seed, timestamp);
  os << "config,frames,total_hits,signal_counts,background_counts,"
        "sbr,sbr_sigma,window_lo,window_hi\n";
  for (const auto& r : results) {
    os << r.name << "," << r.hist.frames << "," << r.hist.total() << ","
       << r.signal_counts << "," << r.background_counts << ",";
    if (r.sbr == kSbrInfinite) os << "inf";
    else os << fmt_double(r.sbr);
    os << "," << fmt_double(r.sbr_sigma) << "," << r.window_lo << ","
       << r.window_hi << "\n";
  }
}

// -- Power report -------------------------------------------------------------

struct PowerReport {
  std::size_t n_off = 0;
  std::size_t n_pc = 0;
  std::size_t n_tof = 0;
  double total_w = 0;
  double programming_time_s = 0;
};

inline PowerReport power_report(const ModeMap& map, const PowerParams& params,
                                double clock_hz) {
  PowerReport rep;
  rep.n_off = map.count(OpMode::Off);
  rep.n_pc = map.count(OpMode::PhotonCounting);
  rep.n_tof = map.count(OpMode::ToF);
  rep.total_w = estimate_power_w(map, params);
  rep.programming_time_s = programming_time_s(kArrayBits, clock_hz);
  return rep;
}

inline void write_power_report(std::ostream& os, const PowerReport& rep) {
  os << "macropixels_off=" << rep.n_off << "\n"
     << "macropixels_counting=" << rep.n_pc << "\n"
     << "macropixels_tof=" << rep.n_tof << "\n"
     << "total_power_w=" << fmt_double(rep.total_w) << "\n"
     << "chain_bits=" << kArrayBits << "\n"
     << "programming_time_s=" << fmt_double(rep.programming_time_s) << "\n";
}

}  // namespace spadfab
