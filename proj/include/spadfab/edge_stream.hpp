// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spadfab/errors.hpp"

namespace spadfab {

/// One 0->1 or 1->0 transition of a digital node.
struct Edge {
  std::int64_t time_ps = 0;
  bool rising = true;

  bool operator==(const Edge&) const = default;
};

/// Time-ordered transitions of one digital node, initial level 0.
/// Times are strictly increasing and polarities strictly alternate
/// starting with a rising edge.
struct EdgeStream {
  std::vector<Edge> edges;

  /// Throws MalformedStream when the invariants do not hold.
  void validate() const {
    bool expect_rising = true;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (const Edge& e : edges) {
      if (e.time_ps <= last)
        throw MalformedStream("edge times not strictly increasing at t=" +
                              std::to_string(e.time_ps));
      if (e.rising != expect_rising)
        throw MalformedStream("polarity does not alternate at t=" +
                              std::to_string(e.time_ps));
      last = e.time_ps;
      expect_rising = !expect_rising;
    }
  }

  /// Level just after all edges with time <= t have been applied.
  bool level_at(std::int64_t t) const {
    auto it = std::upper_bound(
        edges.begin(), edges.end(), t,
        [](std::int64_t v, const Edge& e) { return v < e.time_ps; });
    // Alternation makes the level equal to the parity of applied edges.
    return (it - edges.begin()) & 1;
  }

  bool operator==(const EdgeStream&) const = default;
};

/// Number of rising edges with t0 <= t < t1.
inline std::uint64_t count_rising_edges(const EdgeStream& stream,
                                        std::int64_t t0, std::int64_t t1) {
  if (!(t0 < t1)) throw OutOfRange("count window requires t0 < t1");
  std::uint64_t n = 0;
  for (const Edge& e : stream.edges)
    if (e.rising && e.time_ps >= t0 && e.time_ps < t1) ++n;
  return n;
}

/// Remove cross-stream timestamp collisions from an ensemble of streams.
///
/// Edges are visited in global (time, stream index) order; any edge whose
/// time is not strictly greater than the previous visited edge is bumped to
/// previous+1 ps. Per-stream ordering and alternation are preserved, and the
/// result depends only on the input streams, not on generation order. Used
/// when assembling multi-stream experiments whose counting identities
/// require globally unique timestamps.
inline void detie_streams(std::span<EdgeStream> streams) {
  struct Ref {
    std::int64_t time;
    std::uint32_t stream;
    std::uint32_t index;
  };
  std::vector<Ref> refs;
  std::size_t total = 0;
  for (const EdgeStream& s : streams) total += s.edges.size();
  refs.reserve(total);
  for (std::uint32_t si = 0; si < streams.size(); ++si)
    for (std::uint32_t ei = 0; ei < streams[si].edges.size(); ++ei)
      refs.push_back({streams[si].edges[ei].time_ps, si, ei});
  std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    return a.time != b.time ? a.time < b.time : a.stream < b.stream;
  });
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (const Ref& r : refs) {
    std::int64_t t = r.time > last ? r.time : last + 1;
    streams[r.stream].edges[r.index].time_ps = t;
    last = t;
  }
}

// -- CSV import/export (time_ps, polarity; 1 = rising, 0 = falling) --------

inline void write_edge_csv(std::ostream& os, const EdgeStream& stream) {
  os << "time_ps,polarity\n";
  for (const Edge& e : stream.edges)
    os << e.time_ps << "," << (e.rising ? 1 : 0) << "\n";
}

inline EdgeStream read_edge_csv(std::istream& is) {
  EdgeStream stream;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "time_ps,polarity") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("edge CSV line missing comma", line_no, line);
    try {
      std::size_t p = 0;
      std::int64_t t = std::stoll(line.substr(0, comma), &p);
      if (p != comma) throw std::invalid_argument("trailing");
      const std::string pol = line.substr(comma + 1);
      if (pol != "0" && pol != "1") throw std::invalid_argument("polarity");
      stream.edges.push_back({t, pol == "1"});
    } catch (const std::exception&) {
      throw ParseError("invalid edge CSV record", line_no, line);
    }
  }
  stream.validate();
  return stream;
}

}  // namespace spadfab
