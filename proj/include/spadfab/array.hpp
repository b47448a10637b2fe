// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "spadfab/arrivals.hpp"
#include "spadfab/edge_stream.hpp"
#include "spadfab/errors.hpp"
#include "spadfab/event_engine.hpp"
#include "spadfab/fabric.hpp"
#include "spadfab/readout.hpp"
#include "spadfab/spad.hpp"

namespace spadfab {

inline constexpr double kSpadPitchUm = 10.17;
inline constexpr double kMacropixelPitchUm = 2 * kSpadPitchUm;

/// Half-open rectangle of macropixels, in array coordinates.
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // [x0,x1) x [y0,y1)

  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  void validate() const {
    if (empty()) return;
    if (x0 < 0 || y0 < 0 || x1 > kArrayDim || y1 > kArrayDim)
      throw OutOfBounds("rectangle exceeds the 32x32 array");
  }
};

/// Operating mode per macropixel; Off is a configuration convention
/// (photon-counting mode with an all-zero table), not a hardware state.
enum class OpMode : std::uint8_t { Off = 0, PhotonCounting = 1, ToF = 2 };

/// 32x32 per-macropixel operating mode map.
struct ModeMap {
  std::array<OpMode, kMacropixelCount> modes{};

  OpMode& at(int x, int y) {
    if (x < 0 || x >= kArrayDim || y < 0 || y >= kArrayDim)
      throw OutOfBounds("mode map index out of range");
    return modes[std::size_t(y) * kArrayDim + x];
  }
  OpMode at(int x, int y) const {
    return const_cast<ModeMap*>(this)->at(x, y);
  }

  std::size_t count(OpMode m) const {
    std::size_t n = 0;
    for (OpMode v : modes) n += (v == m);
    return n;
  }
};

/// Text form: 32 lines of 32 characters, '.' = Off, 'C' = counting,
/// 'T' = time-of-flight.
inline void write_mode_map(std::ostream& os, const ModeMap& map) {
  for (int y = 0; y < kArrayDim; ++y) {
    for (int x = 0; x < kArrayDim; ++x) {
      switch (map.at(x, y)) {
        case OpMode::Off: os << '.'; break;
        case OpMode::PhotonCounting: os << 'C'; break;
        case OpMode::ToF: os << 'T'; break;
      }
    }
    os << '\n';
  }
}

inline ModeMap read_mode_map(std::istream& is) {
  ModeMap map;
  std::string line;
  int y = 0;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (y >= kArrayDim)
      throw ParseError("mode map has more than 32 rows", lineno);
    if (line.size() != kArrayDim)
      throw ParseError("mode map row must have exactly 32 characters", lineno,
                       line);
    for (int x = 0; x < kArrayDim; ++x) {
      switch (line[x]) {
        case '.': map.at(x, y) = OpMode::Off; break;
        case 'C': map.at(x, y) = OpMode::PhotonCounting; break;
        case 'T': map.at(x, y) = OpMode::ToF; break;
        default:
          throw ParseError("mode map characters must be '.', 'C' or 'T'",
                           lineno, std::string(1, line[x]));
      }
    }
    ++y;
  }
  if (y != kArrayDim)
    throw ParseError("mode map must have exactly 32 rows, got " +
                     std::to_string(y), lineno);
  return map;
}

/// Per-macropixel power by mode (watts), plus a static floor for the
/// always-on periphery. A ToF pixel runs its GRO and counter on top of the
/// counting datapath, so the ordering p_tof >= p_pc >= p_off >= 0 holds.
struct PowerParams {
  double static_w = 0.0;
  double p_off_w = 0.0;
  double p_pc_w = 0.0;
  double p_tof_w = 0.0;

  void validate() const {
    if (static_w < 0 || p_off_w < 0) throw ConfigError("power must be >= 0");
    if (p_pc_w < p_off_w)
      throw ConfigError("counting-mode power below off-mode power");
    if (p_tof_w < p_pc_w)
      throw ConfigError("ToF-mode power below counting-mode power");
  }
};

/// Static floor plus the sum of per-pixel mode terms.
inline double estimate_power_w(const ModeMap& map, const PowerParams& p) {
  p.validate();
  return p.static_w + double(map.count(OpMode::Off)) * p.p_off_w +
         double(map.count(OpMode::PhotonCounting)) * p.p_pc_w +
         double(map.count(OpMode::ToF)) * p.p_tof_w;
}

/// Rewrite every macropixel in `roi` with the given mode and table; pixels
/// outside are untouched. An empty rectangle is the identity.
inline ArrayConfig configure_roi(const ArrayConfig& base, const Rect& roi,
                                 PixelMode mode, Lut16 lut) {
  roi.validate();
  ArrayConfig out = base;
  if (roi.empty()) return out;
  for (int y = roi.y0; y < roi.y1; ++y)
    for (int x = roi.x0; x < roi.x1; ++x)
      out.at(x, y) = MacropixelConfig{lut, mode};
  return out;
}

inline ModeMap configure_roi(const ModeMap& base, const Rect& roi,
                             OpMode mode) {
  roi.validate();
  ModeMap out = base;
  if (roi.empty()) return out;
  for (int y = roi.y0; y < roi.y1; ++y)
    for (int x = roi.x0; x < roi.x1; ++x) out.at(x, y) = mode;
  return out;
}

/// Scene override for a region; later entries win where rectangles overlap.
struct SceneOverride {
  Rect where;
  Scene scene;
};

/// Default scene plus region overrides.
struct ArrayScene {
  Scene base;
  std::vector<SceneOverride> overrides;

  const Scene& at(int x, int y) const {
    const Scene* found = &base;
    for (const auto& o : overrides)
      if (o.where.contains(x, y)) found = &o.scene;
    return *found;
  }

  void validate() const {
    base.validate();
    for (const auto& o : overrides) {
      o.where.validate();
      o.scene.validate();
      if (o.scene.duration_ps != base.duration_ps)
        throw ConfigError("scene overrides must share the frame duration");
    }
  }
};

/// Per-macropixel result of one frame: a photon count or a ToF histogram.
struct PixelOutput {
  std::variant<std::uint32_t, TofHistogram> value;

  bool is_count() const {
    return std::holds_alternative<std::uint32_t>(value);
  }
  std::uint32_t count() const { return std::get<std::uint32_t>(value); }
  const TofHistogram& histogram() const {
    return std::get<TofHistogram>(value);
  }
};

struct FrameOutput {
  std::vector<PixelOutput> pixels;  // row-major, size 1024

  const PixelOutput& at(int x, int y) const {
    if (x < 0 || x >= kArrayDim || y < 0 || y >= kArrayDim)
      throw OutOfBounds("frame output index out of range");
    return pixels[std::size_t(y) * kArrayDim + x];
  }
};

struct FrameParams {
  std::uint64_t tof_frames = 100;  // laser periods accumulated per ToF pixel
  int counter_bits = 14;
  OverflowPolicy overflow = OverflowPolicy::Wrap;
};

namespace detail {

/// Streams for the four SPADs of one macropixel, de-tied as a group so the
/// shared LUT never sees simultaneous input edges.
inline std::array<EdgeStream, 4> macropixel_streams(
    const ArrayScene& scene, const SpadParams& params, int x, int y,
    std::uint64_t seed) {
  const std::uint64_t mp = std::uint64_t(y) * kArrayDim + x;
  std::array<EdgeStream, 4> streams;
  for (int s = 0; s < 4; ++s)
    streams[s] = spad_stream(scene.at(x, y), params, seed, mp * 4 + s);
  detie_streams(streams);
  return streams;
}

inline PixelOutput run_macropixel(const ArrayScene& scene,
                                  const SpadParams& params,
                                  const MacropixelConfig& cfg, OpMode mode,
                                  const TdcParams& tdc,
                                  const FrameParams& frame, int x, int y,
                                  std::uint64_t seed) {
  if (mode == OpMode::Off) return PixelOutput{std::uint32_t(0)};
  const Scene& local = scene.at(x, y);
  auto streams = macropixel_streams(scene, params, x, y, seed);
  EdgeStream root = simulate_lut4(streams, cfg.lut);
  if (mode == OpMode::PhotonCounting) {
    return PixelOutput{count_mode(root, 0, local.duration_ps,
                                  frame.counter_bits, frame.overflow)};
  }
  if (!local.laser)
    throw ConfigError("ToF pixel (" + std::to_string(x) + "," +
                      std::to_string(y) + ") has no laser in its scene");
  return PixelOutput{acquire_tof(root, *local.laser, tdc, frame.tof_frames)};
}

}  // namespace detail

/// Simulate one frame of the full array. Each SPAD has its own RNG stream
/// (macropixel index * 4 + spad index), so the result is independent of
/// n_threads and of pixel evaluation order.
inline FrameOutput run_array_frame(const ArrayScene& scene,
                                   const SpadParams& params,
                                   const ArrayConfig& config,
                                   const ModeMap& map, const TdcParams& tdc,
                                   std::uint64_t seed,
                                   const FrameParams& frame = {},
                                   unsigned n_threads = 1) {
  scene.validate();
  params.validate();
  if (map.count(OpMode::ToF) > 0) tdc.validate();
  FrameOutput out;
  out.pixels.resize(kMacropixelCount);

  // Mode consistency first, so a bad map fails before any simulation.
  for (int y = 0; y < kArrayDim; ++y)
    for (int x = 0; x < kArrayDim; ++x)
      if (map.at(x, y) == OpMode::ToF && !scene.at(x, y).laser)
        throw ConfigError("ToF pixel (" + std::to_string(x) + "," +
                          std::to_string(y) + ") has no laser in its scene");

  auto work = [&](unsigned first, unsigned step) {
    for (std::size_t i = first; i < kMacropixelCount; i += step) {
      const int x = int(i % kArrayDim);
      const int y = int(i / kArrayDim);
      out.pixels[i] = detail::run_macropixel(
          scene, params, config.macropixels[i], map.at(x, y), tdc, frame, x,
          y, seed);
    }
  };

  if (n_threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back(work, t, n_threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

/// Counting-pixel CSV: x,y,count. ToF pixels are skipped (they get their
/// own histogram files).
inline void write_counts_csv(std::ostream& os, const FrameOutput& frame,
                             const ModeMap& map) {
  os << "x,y,count\n";
  for (int y = 0; y < kArrayDim; ++y)
    for (int x = 0; x < kArrayDim; ++x) {
      if (map.at(x, y) == OpMode::ToF) continue;
      os << x << "," << y << "," << frame.at(x, y).count() << "\n";
    }
}

}  // namespace spadfab
