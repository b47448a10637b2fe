// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "spadfab/combinator.hpp"
#include "spadfab/edge_stream.hpp"
#include "spadfab/fabric.hpp"
#include "spadfab/lut.hpp"

namespace spadfab {

namespace detail {

// Event-driven core shared by both network topologies. Zero-gate-delay
// semantics: all edges at one timestamp are applied, the combinational
// output is recomputed once, and a root edge is emitted iff it changed.
template <std::size_t N, typename Eval>
EdgeStream simulate_zero_delay(const std::array<EdgeStream, N>& inputs,
                               Eval&& eval) {
  struct Ev {
    std::int64_t time;
    std::uint32_t input;
  };
  std::vector<Ev> events;
  std::size_t total = 0;
  for (const EdgeStream& s : inputs) {
    s.validate();
    total += s.edges.size();
  }
  events.reserve(total);
  for (std::uint32_t i = 0; i < N; ++i)
    for (const Edge& e : inputs[i].edges) events.push_back({e.time_ps, i});
  std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
    return a.time != b.time ? a.time < b.time : a.input < b.input;
  });

  EdgeStream out;
  std::uint32_t levels = 0;  // bit i = current level of input i
  bool root = false;         // reported initial level, by stream convention
  // A table may map the all-zero row to 1; the output is then high from
  // t = 0 unless an edge at t = 0 changes it first.
  if (eval(levels) && (events.empty() || events.front().time > 0)) {
    out.edges.push_back({0, true});
    root = true;
  }

  std::size_t i = 0;
  while (i < events.size()) {
    const std::int64_t t = events[i].time;
    for (; i < events.size() && events[i].time == t; ++i)
      levels ^= 1u << events[i].input;  // polarity alternation == toggle
    const bool next = eval(levels);
    if (next != root) {
      out.edges.push_back({t, next});
      root = next;
    }
  }
  return out;
}

// Sampled reference evaluator: reads every input level each dt and emits
// an edge whenever the recomputed output differs from the previous sample.
template <std::size_t N, typename Eval>
EdgeStream oracle_sampled(const std::array<EdgeStream, N>& inputs,
                          std::int64_t dt_ps, Eval&& eval) {
  std::int64_t horizon = 0;
  for (const EdgeStream& s : inputs) {
    s.validate();
    if (!s.edges.empty())
      horizon = std::max(horizon, s.edges.back().time_ps);
  }
  std::array<std::size_t, N> next{};
  std::uint32_t levels = 0;
  EdgeStream out;
  bool prev = false;  // initial level of every node is 0
  for (std::int64_t t = 0; t <= horizon; t += dt_ps) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto& edges = inputs[i].edges;
      while (next[i] < edges.size() && edges[next[i]].time_ps <= t) {
        levels ^= 1u << i;
        ++next[i];
      }
    }
    const bool level = eval(levels);
    if (level != prev) {
      out.edges.push_back({t, level});
      prev = level;
    }
  }
  return out;
}

}  // namespace detail

/// Event-driven evaluation of the two-level test-chip network over 16 SPAD
/// edge streams. SPAD s feeds input (s mod 4) of leaf (s div 4); the root
/// LUT consumes the 4 leaf outputs. Returns the root output stream.
inline EdgeStream simulate_network(const std::array<EdgeStream, 16>& inputs,
                                   const TestChipConfig& config) {
  return detail::simulate_zero_delay(inputs, [&](std::uint32_t levels) {
    return eval_test_chip(config, levels);
  });
}

/// Event-driven evaluation of a single LUT over 4 streams (macropixel case).
inline EdgeStream simulate_lut4(const std::array<EdgeStream, 4>& inputs,
                                Lut16 lut) {
  return detail::simulate_zero_delay(
      inputs, [&](std::uint32_t levels) { return lut.eval_row(levels); });
}

/// Brute-force discretized reference for simulate_network: sample all input
/// levels every dt_ps and emit root changes at sample times. With dt = 1 ps
/// and integer-ps events this reproduces the event-driven output exactly.
inline EdgeStream oracle_discretized(const std::array<EdgeStream, 16>& inputs,
                                     const TestChipConfig& config,
                                     std::int64_t dt_ps) {
  if (dt_ps < 1) throw OutOfRange("oracle step must be >= 1 ps");
  return detail::oracle_sampled(inputs, dt_ps, [&](std::uint32_t levels) {
    return eval_test_chip(config, levels);
  });
}

/// Discretized reference for the single-LUT macropixel topology.
inline EdgeStream oracle_discretized_lut4(
    const std::array<EdgeStream, 4>& inputs, Lut16 lut, std::int64_t dt_ps) {
  if (dt_ps < 1) throw OutOfRange("oracle step must be >= 1 ps");
  return detail::oracle_sampled(
      inputs, dt_ps, [&](std::uint32_t levels) { return lut.eval_row(levels); });
}

}  // namespace spadfab
