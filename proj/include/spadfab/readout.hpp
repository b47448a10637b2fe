// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spadfab/edge_stream.hpp"
#include "spadfab/errors.hpp"
#include "spadfab/spad.hpp"

namespace spadfab {

/// Gated-ring-oscillator TDC parameters. The timing word is
/// fine_bits + coarse_bits wide (4b fine from the GRO phases, 10b coarse
/// from the oscillation counter). The fine LSB is gro_period / 2^fine_bits
/// and must divide the period exactly.
struct TdcParams {
  std::int64_t gro_period_ps = 1600;
  int fine_bits = 4;
  int coarse_bits = 10;
  std::int64_t window_len_ps = 0;    // timing window length
  std::int64_t window_offset_ps = 0; // window start relative to emission
  // Per-code DNL in LSB units (code width = (1 + dnl[c]) * lsb). Empty
  // means an ideal quantizer, which is the default model.
  std::vector<double> dnl;

  std::int64_t lsb_ps() const { return gro_period_ps >> fine_bits; }
  int code_bits() const { return fine_bits + coarse_bits; }
  std::uint32_t code_count() const { return 1u << code_bits(); }
  std::int64_t full_range_ps() const {
    return static_cast<std::int64_t>(code_count()) * lsb_ps();
  }

  /// Bin boundaries (size code_count()+1); code c covers
  /// [edges[c], edges[c+1]). Only needed when a DNL table is set.
  std::vector<std::int64_t> code_edges_ps() const {
    std::vector<std::int64_t> edges(code_count() + 1, 0);
    double acc = 0.0;
    for (std::uint32_t c = 0; c < code_count(); ++c) {
      acc += double(lsb_ps()) * (1.0 + (dnl.empty() ? 0.0 : dnl[c]));
      edges[c + 1] = std::int64_t(acc + 0.5);
    }
    return edges;
  }

  void validate() const {
    if (fine_bits < 1 || coarse_bits < 1 || code_bits() > 30)
      throw ConfigError("unsupported TDC bit widths");
    if (gro_period_ps <= 0 ||
        gro_period_ps % (std::int64_t(1) << fine_bits) != 0)
      throw ConfigError("gro_period_ps must be a positive multiple of 2^" +
                        std::to_string(fine_bits) + " ps");
    if (window_len_ps <= 0) throw ConfigError("window length must be > 0");
    if (window_offset_ps < 0) throw ConfigError("window offset must be >= 0");
    if (!dnl.empty()) {
      if (dnl.size() != code_count())
        throw ConfigError("DNL table must have one entry per code");
      for (double d : dnl)
        if (!(d > -1.0)) throw ConfigError("DNL entries must exceed -1 LSB");
      if (code_edges_ps().back() < window_len_ps)
        throw ConfigError("TDC full range shorter than the timing window");
    } else if (full_range_ps() < window_len_ps) {
      throw ConfigError("TDC full range shorter than the timing window");
    }
  }
};

/// One 14-bit timestamp: fine phase within a GRO period plus coarse count.
struct TdcCode {
  std::uint16_t fine = 0;
  std::uint16_t coarse = 0;

  std::uint32_t index(const TdcParams& p) const {
    return (std::uint32_t(coarse) << p.fine_bits) | fine;
  }
  std::int64_t value_ps(const TdcParams& p) const {
    return coarse * p.gro_period_ps + fine * p.lsb_ps();
  }

  bool operator==(const TdcCode&) const = default;
};

namespace detail {

inline TdcCode code_from_index(std::uint32_t index, const TdcParams& p) {
  return TdcCode{std::uint16_t(index & ((1u << p.fine_bits) - 1)),
                 std::uint16_t(index >> p.fine_bits)};
}

inline TdcCode convert_with_edges(std::int64_t d,
                                  const std::vector<std::int64_t>& edges,
                                  const TdcParams& p) {
  if (d >= edges.back()) return code_from_index(p.code_count() - 1, p);
  const auto it = std::upper_bound(edges.begin(), edges.end(), d);
  return code_from_index(std::uint32_t(it - edges.begin()) - 1, p);
}

}  // namespace detail

/// Quantize a photon time against a timing window. Returns nullopt (NoHit)
/// outside the window; saturates at the maximum code if the delay exceeds
/// the TDC full range.
inline std::optional<TdcCode> tdc_convert(std::int64_t photon_time_ps,
                                          std::int64_t window_start_ps,
                                          const TdcParams& params) {
  if (photon_time_ps < window_start_ps ||
      photon_time_ps >= window_start_ps + params.window_len_ps)
    return std::nullopt;
  const std::int64_t d = photon_time_ps - window_start_ps;
  if (!params.dnl.empty())
    return detail::convert_with_edges(d, params.code_edges_ps(), params);
  if (d >= params.full_range_ps())
    return detail::code_from_index(params.code_count() - 1, params);
  return TdcCode{std::uint16_t(d % params.gro_period_ps / params.lsb_ps()),
                 std::uint16_t(d / params.gro_period_ps)};
}

/// First-photon ToF histogram: one bin per TDC code, at most one hit per
/// laser period.
struct TofHistogram {
  std::vector<std::uint32_t> bins;
  std::uint64_t frames = 0;
  // Codes reachable within the acquisition window; background-per-bin
  // normalization in the SBR uses only these.
  std::uint32_t reachable_codes = 0;

  explicit TofHistogram(std::uint32_t code_count = 1u << 14)
      : bins(code_count, 0), reachable_codes(code_count) {}

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (std::uint32_t b : bins) n += b;
    return n;
  }

  std::uint32_t peak_code() const {
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < bins.size(); ++c)
      if (bins[c] > bins[best]) best = c;
    return best;
  }
};

/// Accumulate a first-photon ToF histogram over `frames` laser periods.
/// Window i opens at emission(i) + window_offset; the first root rising
/// edge inside [start, start + window_len) is converted and binned.
inline TofHistogram acquire_tof(const EdgeStream& root_stream,
                                const LaserSpec& laser,
                                const TdcParams& params,
                                std::uint64_t frames) {
  params.validate();
  laser.validate();
  root_stream.validate();
  TofHistogram hist(params.code_count());
  hist.frames = frames;
  if (params.dnl.empty()) {
    hist.reachable_codes = std::uint32_t(
        std::min<std::int64_t>((params.window_len_ps + params.lsb_ps() - 1) /
                                   params.lsb_ps(),
                               params.code_count()));
  } else {
    const auto e = params.code_edges_ps();
    std::uint32_t n = 0;
    while (n < params.code_count() && e[n] < params.window_len_ps) ++n;
    hist.reachable_codes = n;
  }
  std::vector<std::int64_t> dnl_edges;
  if (!params.dnl.empty()) dnl_edges = params.code_edges_ps();
  const auto& edges = root_stream.edges;
  std::size_t i = 0;
  for (std::uint64_t f = 0; f < frames; ++f) {
    const std::int64_t start =
        laser_emission_ps(f, laser.rep_rate_hz) + params.window_offset_ps;
    while (i < edges.size() &&
           (edges[i].time_ps < start || !edges[i].rising))
      ++i;
    if (i == edges.size()) break;
    if (edges[i].time_ps >= start + params.window_len_ps) continue;
    const std::int64_t d = edges[i].time_ps - start;
    const TdcCode code =
        dnl_edges.empty()
            ? *tdc_convert(edges[i].time_ps, start, params)
            : detail::convert_with_edges(d, dnl_edges, params);
    ++hist.bins[code.index(params)];
  }
  return hist;
}

/// Counter overflow behavior for photon-counting mode.
enum class OverflowPolicy { Wrap, Saturate };

/// Ripple-counter photon counting: rising edges of the LUT output within
/// the window, reduced to `counter_bits` by the overflow policy
/// (asynchronous ripple counters wrap, so Wrap is the default).
inline std::uint32_t count_mode(const EdgeStream& root_stream,
                                std::int64_t t0, std::int64_t t1,
                                int counter_bits = 14,
                                OverflowPolicy policy = OverflowPolicy::Wrap) {
  const std::uint64_t n = count_rising_edges(root_stream, t0, t1);
  const std::uint64_t cap = std::uint64_t(1) << counter_bits;
  if (policy == OverflowPolicy::Wrap) return std::uint32_t(n % cap);
  return std::uint32_t(n < cap ? n : cap - 1);
}

/// Sentinel returned when the background region is empty.
inline constexpr double kSbrInfinite =
    std::numeric_limits<double>::infinity();

/// Signal-to-background ratio of a histogram for an inclusive code range:
/// per-bin signal density over per-bin background density, background taken
/// over the reachable codes outside the signal window.
inline double histogram_sbr(const TofHistogram& hist, std::uint32_t lo_code,
                            std::uint32_t hi_code) {
  if (lo_code > hi_code || hi_code >= hist.reachable_codes)
    throw OutOfRange("signal window outside reachable code range");
  std::uint64_t total = 0, signal = 0;
  for (std::uint32_t c = 0; c < hist.reachable_codes; ++c) {
    total += hist.bins[c];
    if (c >= lo_code && c <= hi_code) signal += hist.bins[c];
  }
  for (std::uint32_t c = hist.reachable_codes;
       c < std::uint32_t(hist.bins.size()); ++c)
    total += hist.bins[c];
  if (total == 0) throw EmptyHistogram("histogram has no counts");
  const std::uint64_t background = total - signal;
  if (background == 0) return kSbrInfinite;
  const double ws = double(hi_code - lo_code + 1);
  const double wb = double(hist.reachable_codes) - ws;
  if (wb <= 0) return kSbrInfinite;  // window covers every reachable bin
  return (double(signal) / ws) / (double(background) / wb);
}

// -- Export -----------------------------------------------------------------

/// Sparse histogram CSV: code,value_ps,count (zero bins omitted).
inline void write_histogram_csv(std::ostream& os, const TofHistogram& hist,
                                const TdcParams& params) {
  os << "code,value_ps,count\n";
  for (std::uint32_t c = 0; c < hist.bins.size(); ++c) {
    if (hist.bins[c] == 0) continue;
    const TdcCode code{std::uint16_t(c & ((1u << params.fine_bits) - 1)),
                       std::uint16_t(c >> params.fine_bits)};
    os << c << "," << code.value_ps(params) << "," << hist.bins[c] << "\n";
  }
}

/// JSON-like one-block summary of an acquisition.
inline void write_histogram_summary(std::ostream& os,
                                    const TofHistogram& hist,
                                    const TdcParams& params,
                                    std::optional<double> sbr = {}) {
  const std::uint32_t peak = hist.peak_code();
  const TdcCode code{std::uint16_t(peak & ((1u << params.fine_bits) - 1)),
                     std::uint16_t(peak >> params.fine_bits)};
  os << "{ \"frames\": " << hist.frames << ", \"total_hits\": " << hist.total()
     << ", \"peak_code\": " << peak
     << ", \"peak_value_ps\": " << code.value_ps(params)
     << ", \"peak_count\": " << hist.bins[peak];
  if (sbr) {
    os << ", \"sbr\": ";
    if (*sbr == kSbrInfinite) os << "\"inf\"";
    else os << *sbr;
    os << " }";
  } else {
    os << " }";
  }
  os << "\n";
}

}  // namespace spadfab
