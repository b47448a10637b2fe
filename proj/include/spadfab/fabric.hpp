// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spadfab/errors.hpp"
#include "spadfab/lut.hpp"

namespace spadfab {

// Configuration-plane geometry.
inline constexpr int kTestChipLutCount = 5;    // 4 leaves + 1 root
inline constexpr int kTestChipBits = 80;       // 5 x 16 stored bits
inline constexpr int kMacropixelBits = 17;     // 16 LUT bits + 1 mode bit
inline constexpr int kArrayDim = 32;           // macropixels per side
inline constexpr int kMacropixelCount = kArrayDim * kArrayDim;
inline constexpr int kArrayBits = kMacropixelCount * kMacropixelBits;  // 17408

/// Ordered bit vector; the serialization carrier for the shift registers.
class BitChain {
public:
  BitChain() = default;
  explicit BitChain(std::vector<bool> bits) : bits_(std::move(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void push_back(bool b) { bits_.push_back(b); }

  bool operator==(const BitChain&) const = default;

  const std::vector<bool>& bits() const { return bits_; }

private:
  std::vector<bool> bits_;
};

/// The 16-SPAD test chip: 4 leaf LUTs (4 SPADs each) feeding a root LUT.
struct TestChipConfig {
  std::array<Lut16, 4> leaf_luts{};
  Lut16 root_lut{};

  bool operator==(const TestChipConfig&) const = default;
};

/// Macropixel acquisition mode, the 17th configuration bit.
/// 0 = photon counting, 1 = time-of-flight (all-zero chain is the
/// lowest-power state).
enum class PixelMode : std::uint8_t { PhotonCounting = 0, ToF = 1 };

/// One 2x2-SPAD macropixel: a single LUT plus the mode bit.
struct MacropixelConfig {
  Lut16 lut{};
  PixelMode mode = PixelMode::PhotonCounting;

  bool operator==(const MacropixelConfig&) const = default;
};

/// The full 32x32 macropixel array, row-major.
struct ArrayConfig {
  std::array<MacropixelConfig, kMacropixelCount> macropixels{};

  MacropixelConfig& at(int x, int y) { return macropixels[y * kArrayDim + x]; }
  const MacropixelConfig& at(int x, int y) const {
    return macropixels[y * kArrayDim + x];
  }

  bool operator==(const ArrayConfig&) const = default;
};

namespace detail {

inline void append_lut(BitChain& chain, Lut16 lut) {
  // Truth-table index 0 shifts first.
  for (int i = 0; i < 16; ++i) chain.push_back((lut.bits >> i) & 1u);
}

inline Lut16 read_lut(const BitChain& chain, std::size_t offset) {
  std::uint16_t bits = 0;
  for (int i = 0; i < 16; ++i)
    if (chain[offset + i]) bits |= std::uint16_t(1u << i);
  return Lut16{bits};
}

}  // namespace detail

/// Serialize the test chip: leaf LUTs 0..3 then the root LUT, 80 bits.
inline BitChain encode_test_chip(const TestChipConfig& config) {
  BitChain chain;
  for (const Lut16& lut : config.leaf_luts) detail::append_lut(chain, lut);
  detail::append_lut(chain, config.root_lut);
  return chain;
}

inline TestChipConfig decode_test_chip(const BitChain& chain) {
  if (chain.size() != kTestChipBits)
    throw WrongLength("test chip chain must be 80 bits, got " +
                      std::to_string(chain.size()));
  TestChipConfig config;
  for (int j = 0; j < 4; ++j)
    config.leaf_luts[j] = detail::read_lut(chain, 16 * j);
  config.root_lut = detail::read_lut(chain, 64);
  return config;
}

/// Serialize one macropixel: 16 LUT bits then the mode bit, 17 bits.
inline BitChain encode_macropixel(const MacropixelConfig& config) {
  BitChain chain;
  detail::append_lut(chain, config.lut);
  chain.push_back(config.mode == PixelMode::ToF);
  return chain;
}

inline MacropixelConfig decode_macropixel(const BitChain& chain) {
  if (chain.size() != kMacropixelBits)
    throw WrongLength("macropixel chain must be 17 bits, got " +
                      std::to_string(chain.size()));
  MacropixelConfig config;
  config.lut = detail::read_lut(chain, 0);
  config.mode = chain[16] ? PixelMode::ToF : PixelMode::PhotonCounting;
  return config;
}

/// Serialize the array: macropixels row-major, 17 bits each, 17408 bits.
inline BitChain encode_array(const ArrayConfig& config) {
  BitChain chain;
  for (const MacropixelConfig& mp : config.macropixels) {
    detail::append_lut(chain, mp.lut);
    chain.push_back(mp.mode == PixelMode::ToF);
  }
  return chain;
}

inline ArrayConfig decode_array(const BitChain& chain) {
  if (chain.size() != kArrayBits)
    throw WrongLength("array chain must be 17408 bits, got " +
                      std::to_string(chain.size()));
  ArrayConfig config;
  for (int m = 0; m < kMacropixelCount; ++m) {
    const std::size_t base = std::size_t(m) * kMacropixelBits;
    config.macropixels[m].lut = detail::read_lut(chain, base);
    config.macropixels[m].mode =
        chain[base + 16] ? PixelMode::ToF : PixelMode::PhotonCounting;
  }
  return config;
}

/// Time to shift a configuration chain in at one bit per clock cycle.
/// 80 bits at 100 MHz: 800 ns; 17408 bits at 10 MHz: 1.7408 ms.
inline double programming_time_s(std::uint64_t bit_count, double clock_hz) {
  if (!(clock_hz > 0.0))
    throw InvalidClock("programming clock must be positive");
  return static_cast<double>(bit_count) / clock_hz;
}

// -- Bitstream file format -------------------------------------------------
//
// Header line "SPADFAB1 <bitcount>", then one line of uppercase hex.
// Chain bit 0 is the most significant bit of the first hex digit; when the
// bit count is not a multiple of 4 the final digit is padded with low zeros.

inline void write_bitstream(std::ostream& os, const BitChain& chain) {
  static const char* digits = "0123456789ABCDEF";
  os << "SPADFAB1 " << chain.size() << "\n";
  unsigned nibble = 0;
  int filled = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    nibble = (nibble << 1) | (chain[i] ? 1u : 0u);
    if (++filled == 4) {
      os << digits[nibble];
      nibble = 0;
      filled = 0;
    }
  }
  if (filled > 0) os << digits[nibble << (4 - filled)];
  os << "\n";
}

inline BitChain read_bitstream(std::istream& is) {
  std::string magic;
  std::uint64_t count = 0;
  if (!(is >> magic >> count) || magic != "SPADFAB1")
    throw ParseError("missing SPADFAB1 bitstream header", 1, magic);
  std::string hex;
  if (!(is >> hex))
    throw ParseError("missing bitstream hex payload", 2, "");
  if (hex.size() != (count + 3) / 4)
    throw ParseError("bitstream hex length " + std::to_string(hex.size()) +
                         " does not match bit count " + std::to_string(count),
                     2, hex);
  BitChain chain;
  for (std::uint64_t i = 0; i < count; ++i) {
    const char c = hex[i / 4];
    unsigned nibble;
    if (c >= '0' && c <= '9') nibble = unsigned(c - '0');
    else if (c >= 'A' && c <= 'F') nibble = unsigned(c - 'A') + 10;
    else if (c >= 'a' && c <= 'f') nibble = unsigned(c - 'a') + 10;
    else
      throw ParseError("invalid hex digit in bitstream", 2, std::string(1, c));
    chain.push_back(nibble >> (3 - i % 4) & 1u);
  }
  // Pad bits of the final digit must be zero.
  if (count % 4 != 0) {
    const char c = hex.back();
    unsigned nibble = (c >= '0' && c <= '9')   ? unsigned(c - '0')
                      : (c >= 'A' && c <= 'F') ? unsigned(c - 'A') + 10
                                               : unsigned(c - 'a') + 10;
    if (nibble & ((1u << (4 - count % 4)) - 1u))
      throw ParseError("nonzero padding bits in bitstream", 2,
                       std::string(1, c));
  }
  return chain;
}

}  // namespace spadfab
