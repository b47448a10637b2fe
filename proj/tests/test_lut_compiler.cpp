// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <bit>

#include "spadfab/combinator.hpp"

using namespace spadfab;

TEST_CASE("named combinators compile to the expected tables") {
  CHECK(compile_lut(or_of()) == Lut16{0xFFFE});
  CHECK(compile_lut(and_of()) == Lut16{0x8000});
  CHECK(compile_lut(xor_of()) == Lut16{0x6996});
  CHECK(compile_lut(coincidence(2)) == Lut16{0xFEE8});
  CHECK(compile_lut(coincidence(3)) == Lut16{0xE880});
  CHECK(compile_lut(coincidence(1)) == Lut16{0xFFFE});  // same as OR
  CHECK(compile_lut(coincidence(4)) == Lut16{0x8000});  // same as AND
}

TEST_CASE("or/and/xor agree with per-row popcount oracles on every mask") {
  for (unsigned mask = 0; mask <= 0xF; ++mask) {
    const Lut16 lo = compile_lut(or_of(mask));
    const Lut16 la = compile_lut(and_of(mask));
    const Lut16 lx = compile_lut(xor_of(mask));
    for (unsigned row = 0; row < 16; ++row) {
      const int n = std::popcount(row & mask);
      const int total = std::popcount(mask);
      CHECK(lo.eval_row(row) == (n > 0));
      CHECK(la.eval_row(row) == (n == total));
      CHECK(lx.eval_row(row) == (n % 2 == 1));
    }
  }
}

TEST_CASE("coincidence agrees with the popcount threshold on every mask") {
  for (unsigned mask = 1; mask <= 0xF; ++mask) {
    const int total = std::popcount(mask);
    for (int k = 1; k <= total; ++k) {
      const Lut16 lut = compile_lut(coincidence(k, mask));
      for (unsigned row = 0; row < 16; ++row)
        CHECK(lut.eval_row(row) == (std::popcount(row & mask) >= k));
    }
  }
}

TEST_CASE("coincidence k outside active inputs is rejected") {
  CHECK_THROWS_AS(compile_lut(coincidence(5)), InvalidSpec);
  CHECK_THROWS_AS(compile_lut(coincidence(0)), InvalidSpec);
  CHECK_THROWS_AS(compile_lut(coincidence(3, 0b0011)), InvalidSpec);
  CHECK_NOTHROW(compile_lut(coincidence(2, 0b0011)));
}

TEST_CASE("passthrough and constant tables") {
  for (int i = 0; i < 4; ++i) {
    const Lut16 lut = compile_lut(passthrough(i));
    for (unsigned row = 0; row < 16; ++row)
      CHECK(lut.eval_row(row) == bool(row >> i & 1));
  }
  CHECK(compile_lut(constant_of(false)) == Lut16{0x0000});
  CHECK(compile_lut(constant_of(true)) == Lut16{0xFFFF});
  CHECK_THROWS_AS(compile_lut(CombinatorSpec::passthrough(2, 0b0011)),
                  InvalidSpec);
}

TEST_CASE("raw passes the table through and requires all inputs active") {
  CHECK(compile_lut(raw_of(0xFEE8)) == Lut16{0xFEE8});
  CHECK(compile_lut(raw_of(0x1234)) == Lut16{0x1234});
  CombinatorSpec s = raw_of(0xFFFF);
  s.input_mask = 0x7;
  CHECK_THROWS_AS(compile_lut(s), InvalidSpec);
}

TEST_CASE("neuron examples") {
  CHECK(compile_neuron({Rational(1), Rational(1), Rational(1), Rational(0)},
                       Rational(2)) == Lut16{0xE8E8});
  CHECK(compile_neuron({Rational(1), Rational(1), Rational(1), Rational(1)},
                       Rational(5)) == Lut16{0x0000});
  CHECK(compile_neuron({Rational(0), Rational(0), Rational(0), Rational(0)},
                       Rational(0)) == Lut16{0xFFFF});
}

TEST_CASE("neuron grid agrees with integer enumeration") {
  // Exhaustive over integer weights in [-2,2]^4 and thresholds in [-4,5].
  for (int w0 = -2; w0 <= 2; ++w0)
    for (int w1 = -2; w1 <= 2; ++w1)
      for (int w2 = -2; w2 <= 2; ++w2)
        for (int w3 = -2; w3 <= 2; ++w3)
          for (int theta = -4; theta <= 5; ++theta) {
            const Lut16 lut = compile_neuron(
                {Rational(w0), Rational(w1), Rational(w2), Rational(w3)},
                Rational(theta));
            const int w[4] = {w0, w1, w2, w3};
            for (unsigned row = 0; row < 16; ++row) {
              int sum = 0;
              for (int j = 0; j < 4; ++j)
                if (row >> j & 1) sum += w[j];
              REQUIRE(lut.eval_row(row) == (sum >= theta));
            }
          }
}

TEST_CASE("neuron with rational weights decides the boundary exactly") {
  // 1/3 + 1/3 + 1/3 >= 1 must be true (exactly equal).
  const Lut16 lut = compile_neuron(
      {Rational(1, 3), Rational(1, 3), Rational(1, 3), Rational(0)},
      Rational(1));
  CHECK(lut.eval_row(0b0111));
  CHECK_FALSE(lut.eval_row(0b0011));
}

TEST_CASE("all-ones neuron at threshold k matches coincidence k") {
  for (unsigned mask = 1; mask <= 0xF; ++mask) {
    for (int k = 1; k <= std::popcount(mask); ++k) {
      std::array<Rational, 4> w{};
      for (int j = 0; j < 4; ++j)
        w[j] = (mask >> j & 1) ? Rational(1) : Rational(0);
      CHECK(compile_lut(neuron(w, Rational(k), mask)) ==
            compile_lut(coincidence(k, mask)));
    }
  }
}

TEST_CASE("inactive inputs never affect the table") {
  const CombinatorSpec specs[] = {
      or_of(0b0101), xor_of(0b0011), and_of(0b1100), coincidence(2, 0b1110),
      CombinatorSpec::passthrough(1, 0b0010),
      neuron({Rational(1), Rational(-1), Rational(2), Rational(0)},
             Rational(1), 0b0111),
  };
  for (const CombinatorSpec& s : specs) {
    const Lut16 lut = compile_lut(s);
    for (unsigned row = 0; row < 16; ++row)
      for (int j = 0; j < 4; ++j)
        if (!(s.input_mask >> j & 1))
          CHECK(lut.eval_row(row) == lut.eval_row(row ^ (1u << j)));
  }
}

TEST_CASE("or/xor/and of an empty mask compile to identity elements") {
  CHECK(compile_lut(or_of(0)) == Lut16{0x0000});
  CHECK(compile_lut(xor_of(0)) == Lut16{0x0000});
  CHECK(compile_lut(and_of(0)) == Lut16{0xFFFF});
}

TEST_CASE("network of ORs is a 16-input OR") {
  NetworkSpec net;
  for (auto& leaf : net.leaves) leaf = or_of();
  net.root = or_of();
  const TestChipConfig config = compile_network(net);
  for (unsigned s = 0; s < 65536; ++s)
    REQUIRE(eval_test_chip(config, s) == (s != 0));
}

TEST_CASE("network of XORs is a 16-input parity") {
  NetworkSpec net;
  for (auto& leaf : net.leaves) leaf = xor_of();
  net.root = xor_of();
  const TestChipConfig config = compile_network(net);
  for (unsigned s = 0; s < 65536; ++s)
    REQUIRE(eval_test_chip(config, s) == bool(std::popcount(s) & 1));
}

TEST_CASE("passthrough chain reads out SPAD 0") {
  NetworkSpec net;
  for (auto& leaf : net.leaves) leaf = passthrough(0);
  net.root = passthrough(0);
  const TestChipConfig config = compile_network(net);
  for (unsigned s = 0; s < 65536; ++s)
    REQUIRE(eval_test_chip(config, s) == bool(s & 1));
}

TEST_CASE("two-level composition matches the composed reference") {
  // Mixed network evaluated against a direct composition of row oracles.
  NetworkSpec net;
  net.leaves[0] = coincidence(2);
  net.leaves[1] = xor_of(0b0111);
  net.leaves[2] = and_of();
  net.leaves[3] = or_of(0b1010);
  net.root = neuron({Rational(2), Rational(1), Rational(1), Rational(-1)},
                    Rational(2));
  const TestChipConfig config = compile_network(net);
  for (unsigned s = 0; s < 65536; ++s) {
    unsigned leaf_bits = 0;
    if (std::popcount(s & 0xFu) >= 2) leaf_bits |= 1;
    if (std::popcount((s >> 4) & 0x7u) & 1) leaf_bits |= 2;
    if (((s >> 8) & 0xFu) == 0xFu) leaf_bits |= 4;
    if ((s >> 12) & 0xAu) leaf_bits |= 8;
    // root: 2*y0 + y1 + y2 - y3 >= 2
    const int sum = 2 * (leaf_bits & 1) + (leaf_bits >> 1 & 1) +
                    (leaf_bits >> 2 & 1) - (leaf_bits >> 3 & 1);
    REQUIRE(eval_test_chip(config, s) == (sum >= 2));
  }
}
