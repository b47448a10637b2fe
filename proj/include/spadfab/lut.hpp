// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "spadfab/errors.hpp"

namespace spadfab {

/// A 16-entry truth table over 4 binary inputs; the unit of reconfigurability.
///
/// Bit i of `bits` is the output when the inputs (x0..x3) form the binary
/// number i with x0 as the least significant bit. Any 16-bit value is a
/// valid table; evaluation is a pure function of (bits, inputs).
struct Lut16 {
  std::uint16_t bits = 0;

  /// Output for truth-table row `row` (only the low 4 bits of row are used).
  constexpr bool eval_row(unsigned row) const {
    return (bits >> (row & 0xFu)) & 1u;
  }

  /// Output for explicit input levels.
  constexpr bool eval(bool x0, bool x1, bool x2, bool x3) const {
    return eval_row((x3 ? 8u : 0u) | (x2 ? 4u : 0u) | (x1 ? 2u : 0u) |
                    (x0 ? 1u : 0u));
  }

  constexpr bool operator==(const Lut16&) const = default;
};

/// Evaluate a LUT on 4 input levels (spec operation form).
constexpr bool eval_lut(Lut16 lut, const std::array<bool, 4>& x) {
  return lut.eval(x[0], x[1], x[2], x[3]);
}

/// Format as "0xHHHH" for reports.
inline std::string to_hex(Lut16 lut) {
  static const char* digits = "0123456789ABCDEF";
  std::string s = "0x....";
  for (int i = 0; i < 4; ++i)
    s[2 + i] = digits[(lut.bits >> (12 - 4 * i)) & 0xF];
  return s;
}

/// Parse a LUT from a "0xHHHH" or decimal string.
inline Lut16 lut_from_string(const std::string& text) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &pos, 0);
  } catch (const std::exception&) {
    throw ParseError("invalid LUT literal '" + text + "'", 0, text);
  }
  if (pos != text.size() || v > 0xFFFFu)
    throw ParseError("invalid LUT literal '" + text + "'", 0, text);
  return Lut16{static_cast<std::uint16_t>(v)};
}

}  // namespace spadfab
