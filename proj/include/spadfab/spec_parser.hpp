// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spadfab/combinator.hpp"
#include "spadfab/errors.hpp"
#include "spadfab/rational.hpp"

namespace spadfab {

// Text form of a two-level network, one assignment per line:
//
//   leaf0 = xor(0,1,2,3)
//   leaf1 = neuron(w=[1,1,1,0], theta=2)
//   leaf2 = raw(0xFEE8)
//   leaf3 = pass(2)
//   root  = coinc2(0,1,2,3)
//
// Functions: or/and/xor over an input list, coincK (k-of-n), pass(i),
// const(0|1), raw(hex or decimal table), neuron(w=[...], theta=...).
// '#' starts a comment. A single-table file uses the target `lut`.

namespace detail {

struct Token {
  std::string text;
  int line;
  int col;
};

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Token> lex_line(const std::string& line, int lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const int col = int(i) + 1;
    if (ident_char(c) || c == '-') {
      std::size_t j = i + 1;
      while (j < line.size() &&
             (ident_char(line[j]) || line[j] == '.' || line[j] == '/'))
        ++j;
      out.push_back({line.substr(i, j - i), lineno, col});
      i = j;
    } else if (c == '=' || c == '(' || c == ')' || c == '[' || c == ']' ||
               c == ',') {
      out.push_back({std::string(1, c), lineno, col});
      ++i;
    } else {
      throw ParseError("unexpected character", lineno, std::string(1, c));
    }
  }
  return out;
}

/// Cursor over one statement's tokens.
class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, int lineno)
      : tokens_(std::move(tokens)), line_(lineno) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    if (done())
      throw ParseError("unexpected end of line", line_);
    return tokens_[pos_];
  }
  Token take() {
    Token t = peek();
    ++pos_;
    return t;
  }
  Token expect(const std::string& text) {
    const Token t = take();
    if (t.text != text)
      throw ParseError("expected '" + text + "'", t.line, t.text);
    return t;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
};

inline int parse_index(TokenStream& ts) {
  const Token t = ts.take();
  if (t.text.size() == 1 && t.text[0] >= '0' && t.text[0] <= '3')
    return t.text[0] - '0';
  throw ParseError("expected an input index 0..3", t.line, t.text);
}

inline std::uint8_t parse_index_mask(TokenStream& ts) {
  std::uint8_t mask = 0;
  ts.expect("(");
  if (ts.peek().text == ")") {
    ts.take();
    return mask;
  }
  for (;;) {
    const Token t = ts.peek();
    const int idx = parse_index(ts);
    if (mask & (1u << idx))
      throw ParseError("duplicate input index", t.line, t.text);
    mask |= std::uint8_t(1u << idx);
    const Token sep = ts.take();
    if (sep.text == ")") return mask;
    if (sep.text != ",")
      throw ParseError("expected ',' or ')'", sep.line, sep.text);
  }
}

inline Rational parse_rational_token(TokenStream& ts) {
  const Token t = ts.take();
  try {
    return Rational::parse(t.text);
  } catch (const Error&) {
    throw ParseError("expected a number", t.line, t.text);
  }
}

inline CombinatorSpec parse_expr(TokenStream& ts) {
  const Token name = ts.take();
  if (name.text == "or") return or_of(parse_index_mask(ts));
  if (name.text == "and") return and_of(parse_index_mask(ts));
  if (name.text == "xor") return xor_of(parse_index_mask(ts));
  if (name.text.rfind("coinc", 0) == 0 && name.text.size() > 5) {
    int k = 0;
    for (std::size_t i = 5; i < name.text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name.text[i])))
        throw ParseError("expected coincK with integer K", name.line,
                         name.text);
      k = k * 10 + (name.text[i] - '0');
    }
    return coincidence(k, parse_index_mask(ts));
  }
  if (name.text == "pass") {
    ts.expect("(");
    const int idx = parse_index(ts);
    ts.expect(")");
    return passthrough(idx);
  }
  if (name.text == "const") {
    ts.expect("(");
    const Token t = ts.take();
    ts.expect(")");
    if (t.text == "0") return constant_of(false);
    if (t.text == "1") return constant_of(true);
    throw ParseError("expected const(0) or const(1)", t.line, t.text);
  }
  if (name.text == "raw") {
    ts.expect("(");
    const Token t = ts.take();
    ts.expect(")");
    unsigned long v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoul(t.text, &pos, 0);
      if (pos != t.text.size()) throw std::invalid_argument(t.text);
    } catch (const std::exception&) {
      throw ParseError("expected a 16-bit table value", t.line, t.text);
    }
    if (v > 0xFFFFu)
      throw ParseError("table value exceeds 16 bits", t.line, t.text);
    return raw_of(std::uint16_t(v));
  }
  if (name.text == "neuron") {
    ts.expect("(");
    ts.expect("w");
    ts.expect("=");
    ts.expect("[");
    std::array<Rational, 4> w;
    for (int i = 0; i < 4; ++i) {
      w[i] = parse_rational_token(ts);
      if (i < 3) ts.expect(",");
    }
    ts.expect("]");
    ts.expect(",");
    ts.expect("theta");
    ts.expect("=");
    const Rational theta = parse_rational_token(ts);
    ts.expect(")");
    return neuron(w, theta);
  }
  throw ParseError("unknown function", name.line, name.text);
}

}  // namespace detail

/// Parse a single combinator expression such as `coinc2(0,1,2,3)`.
inline CombinatorSpec parse_combinator_expr(const std::string& text,
                                            int lineno = 1) {
  detail::TokenStream ts(detail::lex_line(text, lineno), lineno);
  CombinatorSpec spec = detail::parse_expr(ts);
  if (!ts.done())
    throw ParseError("trailing input after expression", lineno,
                     ts.peek().text);
  spec.validate();
  return spec;
}

/// Parse a five-assignment network spec (leaf0..leaf3 and root).
inline NetworkSpec parse_network_spec(std::istream& is) {
  std::array<std::optional<CombinatorSpec>, 4> leaves;
  std::optional<CombinatorSpec> root;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto tokens = detail::lex_line(line, lineno);
    if (tokens.empty()) continue;
    detail::TokenStream ts(std::move(tokens), lineno);
    const detail::Token target = ts.take();
    ts.expect("=");
    CombinatorSpec spec = detail::parse_expr(ts);
    if (!ts.done())
      throw ParseError("trailing input after expression", lineno,
                       ts.peek().text);
    spec.validate();
    std::optional<CombinatorSpec>* slot = nullptr;
    if (target.text == "root") {
      slot = &root;
    } else if (target.text.size() == 5 &&
               target.text.rfind("leaf", 0) == 0 && target.text[4] >= '0' &&
               target.text[4] <= '3') {
      slot = &leaves[target.text[4] - '0'];
    } else {
      throw ParseError("expected leaf0..leaf3 or root", target.line,
                       target.text);
    }
    if (slot->has_value())
      throw ParseError("duplicate assignment", target.line, target.text);
    *slot = spec;
  }
  for (int i = 0; i < 4; ++i)
    if (!leaves[i])
      throw ParseError("missing assignment for leaf" + std::to_string(i),
                       lineno);
  if (!root) throw ParseError("missing assignment for root", lineno);
  return NetworkSpec{{*leaves[0], *leaves[1], *leaves[2], *leaves[3]}, *root};
}

inline NetworkSpec parse_network_spec_string(const std::string& text) {
  std::istringstream is(text);
  return parse_network_spec(is);
}

}  // namespace spadfab
