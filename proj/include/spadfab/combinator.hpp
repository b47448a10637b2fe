// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>

#include "spadfab/errors.hpp"
#include "spadfab/fabric.hpp"
#include "spadfab/lut.hpp"
#include "spadfab/rational.hpp"

namespace spadfab {

enum class CombinatorKind {
  Or,
  Xor,
  And,
  Coincidence,
  Neuron,
  Constant,
  Passthrough,
  Raw,
};

inline const char* to_string(CombinatorKind k) {
  switch (k) {
    case CombinatorKind::Or: return "or";
    case CombinatorKind::Xor: return "xor";
    case CombinatorKind::And: return "and";
    case CombinatorKind::Coincidence: return "coinc";
    case CombinatorKind::Neuron: return "neuron";
    case CombinatorKind::Constant: return "const";
    case CombinatorKind::Passthrough: return "pass";
    case CombinatorKind::Raw: return "raw";
  }
  return "?";
}

/// High-level description of a single LUT function over up to 4 inputs.
///
/// `input_mask` selects the active inputs; the compiled table never depends
/// on inactive inputs. Or/Xor/And over an empty mask compile to their
/// identity element (0, 0, 1). Raw tables must keep all inputs active,
/// since an arbitrary table could otherwise observe a masked-out input.
struct CombinatorSpec {
  CombinatorKind kind = CombinatorKind::Or;
  unsigned input_mask = 0xF;

  int k = 1;                          // Coincidence
  std::array<Rational, 4> weights{};  // Neuron
  Rational threshold{};               // Neuron
  bool constant = false;              // Constant
  int pass_index = 0;                 // Passthrough
  std::uint16_t raw = 0;              // Raw

  /// Throws InvalidSpec when the fields are inconsistent for the kind.
  void validate() const {
    if (input_mask > 0xF)
      throw InvalidSpec("input mask must be a 4-bit value");
    const int active = std::popcount(input_mask);
    switch (kind) {
      case CombinatorKind::Coincidence:
        if (k < 1 || k > active)
          throw InvalidSpec("coincidence k=" + std::to_string(k) +
                            " outside 1.." + std::to_string(active) +
                            " active inputs");
        break;
      case CombinatorKind::Passthrough:
        if (pass_index < 0 || pass_index > 3 ||
            !(input_mask >> pass_index & 1u))
          throw InvalidSpec("passthrough input " + std::to_string(pass_index) +
                            " is not an active input");
        break;
      case CombinatorKind::Raw:
        if (input_mask != 0xF)
          throw InvalidSpec("raw tables require all inputs active");
        break;
      default:
        break;
    }
  }

  // Factory helpers.
  static CombinatorSpec or_of(unsigned mask = 0xF) {
    return {CombinatorKind::Or, mask};
  }
  static CombinatorSpec xor_of(unsigned mask = 0xF) {
    return {CombinatorKind::Xor, mask};
  }
  static CombinatorSpec and_of(unsigned mask = 0xF) {
    return {CombinatorKind::And, mask};
  }
  static CombinatorSpec coincidence(int k, unsigned mask = 0xF) {
    CombinatorSpec s{CombinatorKind::Coincidence, mask};
    s.k = k;
    return s;
  }
  static CombinatorSpec neuron(std::array<Rational, 4> weights,
                               Rational threshold, unsigned mask = 0xF) {
    CombinatorSpec s{CombinatorKind::Neuron, mask};
    s.weights = weights;
    s.threshold = threshold;
    return s;
  }
  static CombinatorSpec constant_of(bool bit) {
    CombinatorSpec s{CombinatorKind::Constant};
    s.constant = bit;
    return s;
  }
  static CombinatorSpec passthrough(int index, unsigned mask) {
    CombinatorSpec s{CombinatorKind::Passthrough, mask};
    s.pass_index = index;
    return s;
  }
  static CombinatorSpec passthrough(int index) {
    return passthrough(index, 1u << index);
  }
  static CombinatorSpec raw_of(std::uint16_t bits) {
    CombinatorSpec s{CombinatorKind::Raw};
    s.raw = bits;
    return s;
  }
};

// Namespace-scope spellings of the factories, for call sites that build
// many specs (parsers, tree builders).
inline CombinatorSpec or_of(unsigned mask = 0xF) {
  return CombinatorSpec::or_of(mask);
}
inline CombinatorSpec xor_of(unsigned mask = 0xF) {
  return CombinatorSpec::xor_of(mask);
}
inline CombinatorSpec and_of(unsigned mask = 0xF) {
  return CombinatorSpec::and_of(mask);
}
inline CombinatorSpec coincidence(int k, unsigned mask = 0xF) {
  return CombinatorSpec::coincidence(k, mask);
}
inline CombinatorSpec neuron(const std::array<Rational, 4>& weights,
                             const Rational& threshold, unsigned mask = 0xF) {
  return CombinatorSpec::neuron(weights, threshold, mask);
}
inline CombinatorSpec constant_of(bool bit) {
  return CombinatorSpec::constant_of(bit);
}
inline CombinatorSpec passthrough(int index) {
  return CombinatorSpec::passthrough(index);
}
inline CombinatorSpec raw_of(std::uint16_t bits) {
  return CombinatorSpec::raw_of(bits);
}

namespace detail {

inline bool combinator_row(const CombinatorSpec& s, unsigned row) {
  const unsigned active = row & s.input_mask;
  switch (s.kind) {
    case CombinatorKind::Or:
      return active != 0;
    case CombinatorKind::Xor:
      return std::popcount(active) & 1;
    case CombinatorKind::And:
      return active == s.input_mask;
    case CombinatorKind::Coincidence:
      return std::popcount(active) >= s.k;
    case CombinatorKind::Neuron: {
      Rational sum{0};
      for (int j = 0; j < 4; ++j)
        if (active >> j & 1u) sum = sum + s.weights[j];
      return sum >= s.threshold;
    }
    case CombinatorKind::Constant:
      return s.constant;
    case CombinatorKind::Passthrough:
      return active >> s.pass_index & 1u;
    case CombinatorKind::Raw:
      return (s.raw >> row) & 1u;
  }
  return false;
}

}  // namespace detail

/// Synthesize the 16-entry truth table realizing a combinator spec.
inline Lut16 compile_lut(const CombinatorSpec& spec) {
  spec.validate();
  std::uint16_t bits = 0;
  for (unsigned row = 0; row < 16; ++row)
    if (detail::combinator_row(spec, row)) bits |= std::uint16_t(1u << row);
  return Lut16{bits};
}

/// Encode a weighted-sum-and-threshold neuron as a LUT:
/// bit i = 1 iff sum_j weights[j] * x_j(i) >= threshold.
inline Lut16 compile_neuron(const std::array<Rational, 4>& weights,
                            const Rational& threshold) {
  return compile_lut(CombinatorSpec::neuron(weights, threshold));
}

/// Two-level tree spec: 4 leaf combinators over SPAD groups plus a root
/// combinator over the 4 leaf outputs, matching the test chip topology.
struct NetworkSpec {
  std::array<CombinatorSpec, 4> leaves;
  CombinatorSpec root;
};

/// Compile a network spec into the five test-chip LUTs. The root consumes
/// the 4 leaf outputs in leaf index order.
inline TestChipConfig compile_network(const NetworkSpec& spec) {
  TestChipConfig config;
  for (int j = 0; j < 4; ++j) config.leaf_luts[j] = compile_lut(spec.leaves[j]);
  config.root_lut = compile_lut(spec.root);
  return config;
}

/// Static evaluation of a test-chip config on a 16-bit SPAD level word
/// (bit s = level of SPAD s; leaf j sees SPADs 4j..4j+3).
inline bool eval_test_chip(const TestChipConfig& config, unsigned spad_levels) {
  unsigned leaf_levels = 0;
  for (int j = 0; j < 4; ++j)
    if (config.leaf_luts[j].eval_row(spad_levels >> (4 * j) & 0xFu))
      leaf_levels |= 1u << j;
  return config.root_lut.eval_row(leaf_levels);
}

}  // namespace spadfab
