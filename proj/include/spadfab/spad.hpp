// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spadfab/errors.hpp"

namespace spadfab {

/// SPAD breakdown voltage observed on the test chip, documentation only;
/// the behavioral model never evaluates avalanche physics.
inline constexpr double kBreakdownVoltageV = 20.0;

/// Behavioral front-end parameters of one SPAD.
struct SpadParams {
  double pde = 1.0;                  // photon detection efficiency, [0,1]
  double dcr_hz = 0.0;               // dark-count rate
  std::int64_t dead_time_ps = 1;     // blind interval after a detection
  std::int64_t pulse_width_ps = 1;   // high time of the output pulse
  double v_ex = 0.0;                 // excess bias, informational
  double v_q = 0.0;                  // quench voltage, informational
  bool paralyzable = false;          // dead-time model selector

  void validate() const {
    if (!(pde >= 0.0 && pde <= 1.0))
      throw ConfigError("pde must be in [0,1]");
    if (!(dcr_hz >= 0.0)) throw ConfigError("dcr_hz must be >= 0");
    if (pulse_width_ps <= 0 || pulse_width_ps > dead_time_ps)
      throw ConfigError("pulse width must satisfy 0 < width <= dead time");
  }
};

/// Pulsed-laser stimulus: periodic pulses returning from a target at a
/// fixed true time of flight, with Gaussian arrival jitter.
struct LaserSpec {
  double rep_rate_hz = 0.0;
  std::int64_t tof_ps = 0;
  double jitter_sigma_ps = 0.0;
  double signal_photons_per_pulse_mean = 0.0;

  void validate() const {
    if (!(rep_rate_hz > 0.0)) throw ConfigError("laser rep rate must be > 0");
    if (tof_ps < 0) throw ConfigError("tof_ps must be >= 0");
    if (!(jitter_sigma_ps >= 0.0))
      throw ConfigError("jitter sigma must be >= 0");
    if (!(signal_photons_per_pulse_mean >= 0.0))
      throw ConfigError("signal photons per pulse must be >= 0");
  }
};

/// Emission time of laser pulse p; acquisition windows anchor to the same
/// formula so stimulus and readout agree on pulse phase.
inline std::int64_t laser_emission_ps(std::uint64_t pulse_index,
                                      double rep_rate_hz) {
  return std::llround(static_cast<double>(pulse_index) * 1e12 / rep_rate_hz);
}

/// Stimulus seen by one SPAD (or, uniformly, by every SPAD of a macropixel).
struct Scene {
  double background_flux_hz = 0.0;  // mean photon arrival rate per SPAD
  std::optional<LaserSpec> laser;
  std::int64_t duration_ps = 0;

  void validate() const {
    if (!(background_flux_hz >= 0.0))
      throw ConfigError("background flux must be >= 0");
    if (duration_ps < 0) throw ConfigError("duration must be >= 0");
    if (laser) laser->validate();
  }
};

// -- Bias curve --------------------------------------------------------------
//
// Measured operating-point table: (v_q, v_ex) -> (pde, dead time, pulse
// width), interpolated bilinearly over a complete rectangular grid.
// Raising the excess bias improves detection efficiency but lengthens the
// dead time, which is the trade-off the OR-saturation experiment probes;
// both monotonicities are checked when a curve is loaded.

class BiasCurve {
public:
  struct Point {
    double pde = 0.0;
    double dead_time_ps = 0.0;
    double pulse_width_ps = 0.0;
  };

  /// Build from sample rows; every (v_q, v_ex) combination must be present.
  static BiasCurve from_rows(
      const std::vector<std::pair<std::pair<double, double>, Point>>& rows) {
    BiasCurve curve;
    for (const auto& [vq_vex, p] : rows) {
      insert_sorted(curve.vq_, vq_vex.first);
      insert_sorted(curve.vex_, vq_vex.second);
    }
    curve.grid_.assign(curve.vq_.size() * curve.vex_.size(), Point{});
    std::vector<bool> seen(curve.grid_.size(), false);
    for (const auto& [vq_vex, p] : rows) {
      const std::size_t i = index_of(curve.vq_, vq_vex.first);
      const std::size_t j = index_of(curve.vex_, vq_vex.second);
      const std::size_t idx = i * curve.vex_.size() + j;
      if (seen[idx])
        throw ConfigError("duplicate bias curve point (v_q=" +
                          std::to_string(vq_vex.first) + ", v_ex=" +
                          std::to_string(vq_vex.second) + ")");
      seen[idx] = true;
      curve.grid_[idx] = p;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
      throw ConfigError("bias curve grid is incomplete: need every "
                        "(v_q, v_ex) combination");
    curve.validate();
    return curve;
  }

  /// CSV columns: v_q,v_ex,pde,dead_time_ps,pulse_width_ps.
  static BiasCurve from_csv(std::istream& is) {
    std::vector<std::pair<std::pair<double, double>, Point>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      if (line.find("v_q") == 0) continue;  // header
      std::istringstream ls(line);
      std::string field;
      double v[5];
      for (int i = 0; i < 5; ++i) {
        if (!std::getline(ls, field, ','))
          throw ParseError("bias curve row needs 5 fields", line_no, line);
        try {
          std::size_t p = 0;
          v[i] = std::stod(field, &p);
          while (p < field.size() &&
                 std::isspace(static_cast<unsigned char>(field[p])))
            ++p;
          if (p != field.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw ParseError("invalid number in bias curve", line_no, field);
        }
      }
      rows.push_back({{v[0], v[1]}, Point{v[2], v[3], v[4]}});
    }
    if (rows.empty()) throw ConfigError("bias curve file has no data rows");
    return from_rows(rows);
  }

  /// Bilinear interpolation of each output independently; exact at grid
  /// points. Throws OutOfRange outside the grid bounding box.
  Point lookup(double v_q, double v_ex) const {
    const auto [i0, i1, tq] = bracket(vq_, v_q, "v_q");
    const auto [j0, j1, te] = bracket(vex_, v_ex, "v_ex");
    const auto lerp2 = [&](auto get) {
      const double a = get(at(i0, j0)) * (1 - te) + get(at(i0, j1)) * te;
      const double b = get(at(i1, j0)) * (1 - te) + get(at(i1, j1)) * te;
      return a * (1 - tq) + b * tq;
    };
    Point out;
    out.pde = lerp2([](const Point& p) { return p.pde; });
    out.dead_time_ps = lerp2([](const Point& p) { return p.dead_time_ps; });
    out.pulse_width_ps =
        lerp2([](const Point& p) { return p.pulse_width_ps; });
    return out;
  }

  /// SpadParams at an operating point (times rounded to integer ps).
  SpadParams params_at(double v_q, double v_ex, double dcr_hz = 0.0) const {
    const Point p = lookup(v_q, v_ex);
    SpadParams params;
    params.pde = p.pde;
    params.dcr_hz = dcr_hz;
    params.dead_time_ps = std::llround(p.dead_time_ps);
    params.pulse_width_ps = std::min<std::int64_t>(
        std::llround(p.pulse_width_ps), params.dead_time_ps);
    params.v_q = v_q;
    params.v_ex = v_ex;
    params.validate();
    return params;
  }

  const std::vector<double>& vq_values() const { return vq_; }
  const std::vector<double>& vex_values() const { return vex_; }

private:
  static void insert_sorted(std::vector<double>& axis, double v) {
    auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.end() || *it != v) axis.insert(it, v);
  }

  static std::size_t index_of(const std::vector<double>& axis, double v) {
    return std::size_t(std::lower_bound(axis.begin(), axis.end(), v) -
                       axis.begin());
  }

  static std::tuple<std::size_t, std::size_t, double> bracket(
      const std::vector<double>& axis, double v, const char* name) {
    if (v < axis.front() || v > axis.back())
      throw OutOfRange(std::string(name) + "=" + std::to_string(v) +
                       " outside bias curve domain [" +
                       std::to_string(axis.front()) + ", " +
                       std::to_string(axis.back()) + "]");
    if (axis.size() == 1) return {0, 0, 0.0};
    auto hi = std::upper_bound(axis.begin(), axis.end(), v);
    if (hi == axis.end()) --hi;
    if (hi == axis.begin()) ++hi;
    const std::size_t i1 = std::size_t(hi - axis.begin());
    const std::size_t i0 = i1 - 1;
    const double t = (v - axis[i0]) / (axis[i1] - axis[i0]);
    return {i0, i1, t};
  }

  const Point& at(std::size_t i, std::size_t j) const {
    return grid_[i * vex_.size() + j];
  }

  void validate() const {
    for (const Point& p : grid_) {
      if (!(p.pde >= 0.0 && p.pde <= 1.0))
        throw ConfigError("bias curve pde outside [0,1]");
      if (!(p.pulse_width_ps > 0.0 && p.pulse_width_ps <= p.dead_time_ps))
        throw ConfigError("bias curve pulse width must satisfy "
                          "0 < width <= dead time");
    }
    // pde and dead time must be non-decreasing in v_ex at fixed v_q.
    for (std::size_t i = 0; i < vq_.size(); ++i) {
      for (std::size_t j = 1; j < vex_.size(); ++j) {
        if (at(i, j).pde < at(i, j - 1).pde)
          throw ConfigError("bias curve pde not monotone in v_ex at v_q=" +
                            std::to_string(vq_[i]));
        if (at(i, j).dead_time_ps < at(i, j - 1).dead_time_ps)
          throw ConfigError(
              "bias curve dead time not monotone in v_ex at v_q=" +
              std::to_string(vq_[i]));
      }
    }
  }

  std::vector<double> vq_;
  std::vector<double> vex_;
  std::vector<Point> grid_;
};

}  // namespace spadfab
